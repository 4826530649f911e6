import sys

from hypothesis import settings

if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")
