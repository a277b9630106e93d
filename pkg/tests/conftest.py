import os
import sys

from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("repo", derandomize=True, deadline=None, max_examples=200)
settings.load_profile("repo")
