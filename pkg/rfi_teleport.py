#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
DESCRIPTION: Entry script for the reference-frame-independent teleportation toolkit.

USAGE:
    python rfi_teleport.py demo z2 --out output/z2
    python rfi_teleport.py analyze rep.json --require-answer
    python rfi_teleport.py simulate rep.json bundle.json --procedure unspeakable --expect-perfect
"""

import sys
import os
sys.path.append(os.path.abspath(os.path.dirname(__file__)))
from rfi_teleportation.cli import main

if __name__ == '__main__':
    sys.exit(main())
