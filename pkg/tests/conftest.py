import os
import sys

# Modules under src/ import each other by bare name
ROOT = os.path.join(os.path.dirname(__file__), '..')
sys.path.insert(0, os.path.join(ROOT, 'src'))
sys.path.insert(0, ROOT)

LONG_TESTS = os.getenv('DEFECT_VERIFIER_LONG_TESTS', '').strip() not in ('', '0')
