#!/usr/bin/env python
"""randpoly - A numerical laboratory for random polytopes of atomic measures.

See LICENSE.txt for copyright and license.
"""
import sys
from randpoly_ui import main
if __name__ == '__main__':
    sys.exit(main() or 0)
