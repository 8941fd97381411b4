#!/usr/bin/env python3
"""
Main entry point for the Rumin Currents Toolkit command line
"""
import sys

from app.main import main

if __name__ == "__main__":
    sys.exit(main())
