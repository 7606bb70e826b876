"""Invariants and Veech groups of a few small origamis.

Run:  python3 demos/origami_tour.py
"""
from teichforge.surface_atlas import build_atlas
from teichforge.veech import Origami, origami_export, veech_of_origami

examples = {
    "torus": Origami((0,), (0,)),
    "two squares in a row": Origami((1, 0), (0, 1)),
    "three squares in a row": Origami((1, 2, 0), (0, 1, 2)),
    "L shape": Origami((1, 0, 2), (2, 1, 0)),
    "pi14 cover": origami_export(build_atlas().F14_in_F11),
}

for name, o in examples.items():
    r = veech_of_origami(o)
    print(f"{name:24s} d={o.degree} genus={o.genus} punctures={o.punctures} "
          f"[SL(2,Z):Veech]={r.orbit_size}")
