"""With deliberately small primes Lambda is small enough to write down as a
coset table.  Compare the layered conjugacy test with the table one.

Run:  python3 demos/toy_cross_check.py
"""
from teichforge.suites import toy_suite

r = toy_suite()
d = r.details
print(f"toy primes {d['toy_primes']}: [pi14:Lambda] = {d['index']}, "
      f"degree in pi11 = {d['pi11_degree']}")
print(f"{d['agree']}/{d['pairs']} pairs agree; orbit sizes layered {d['layered_orbit']}, "
      f"table {d['table_orbit']}")
