"""
Run the ratimpl command-line toolkit
"""

import sys

from ratimpl.cli import main

if __name__ == '__main__':
    sys.exit(main())
