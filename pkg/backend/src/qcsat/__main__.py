# src/qcsat/__main__.py
import sys

from qcsat.cli import main

sys.exit(main())
