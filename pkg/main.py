#!/usr/bin/env python3
"""
Haar Projection Lab
Main entry point for the command-line application.
"""

import sys

from cli import run


def main():
    """Main application entry point."""
    sys.exit(run(sys.argv[1:]))


if __name__ == '__main__':
    main()
