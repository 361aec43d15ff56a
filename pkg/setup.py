"""randpoly - A numerical laboratory for random polytopes of atomic measures.

See LICENSE.txt for copyright and license.
"""

import os
import re
import shutil

from setuptools import setup
from setuptools.command.install_scripts import install_scripts

packages = ['randpoly',
            'randpoly_ui',
            ]

def read_version(name):
    with open(os.path.join(os.path.dirname(os.path.abspath(__file__)), name, '__init__.py')) as f:
        return re.search(r'^__version__ = ["\']([^"\']+)["\']', f.read(), re.M).group(1)

versions = dict((name, read_version(name)) for name in packages if name != 'randpoly_ui')
versions['randpoly_ui'] = versions['randpoly']
provides = ["%s (%s)" % (name, versions[name]) for name in packages]
__version__ = versions['randpoly']

class my_install(install_scripts):
    def run(self):
        install_scripts.run(self)
        for script in self.get_outputs():
            if script.endswith(".py"):
                shutil.move(script, script[:-3])

setup(name='randpoly',
      version=__version__,
      description='A numerical laboratory for random polytopes of atomic measures.',
      platforms='OS Independent',
      packages=packages,
      provides=provides,
      scripts=['randpoly.py'],
      python_requires='>=3.8',
      install_requires=['numpy>=1.20',
                        'scipy>=1.6',
                        'mpmath>=1.1',
                        ],
      extras_require={'tests': ['pytest>=7']},
      license='MIT',
      long_description='\n' + open('README.txt').read(),
      classifiers=[
          'Development Status :: 4 - Beta',
          'Intended Audience :: Science/Research',
          'License :: OSI Approved :: MIT License',
          'Operating System :: OS Independent',
          'Programming Language :: Python',
          'Programming Language :: Python :: 3',
          'Topic :: Scientific/Engineering :: Mathematics',
          ],
      cmdclass = {"install_scripts": my_install}
      )
