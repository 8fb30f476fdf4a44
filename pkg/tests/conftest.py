import os
import sys

# let the test modules import fixtures.py as a plain module
sys.path.insert(0, os.path.dirname(__file__))
