"""Built-in germs and file corpus used by the verification suites."""

from __future__ import annotations

import os
import random

from gmpy2 import mpq

from .exactalg import parse_poly
from .foliation import parse_one_form, write_fol
from .nilcat import TakensSpec, takens_form

G = ("x", "y")


def _line(name, text, coeffs):
    return (name, parse_poly(text, G), [coeffs])


def audit_corpus():
    """(name, form, curves) triples for the one-step blow-up audit.

    Curves are invariant through the origin, each with a single branch given
    by an exact parametrization.
    """
    from .elimination import family_generator

    ax = _line("y", "y", ([0, 1], [0]))
    ay = _line("x", "x", ([0], [0, 1]))
    return [
        ("linear saddle -1", parse_one_form("(y) dx + (x) dy"), [ax, ay]),
        ("linear saddle 2/3", parse_one_form("(2*y) dx + (-3*x) dy"), [ax, ay]),
        ("resonant node 2", parse_one_form("(2*y) dx + (-x) dy"), [ax, ay]),
        ("cusp d(y^2+x^3)", parse_one_form("(3*x^2) dx + (2*y) dy"),
         [("y^2+x^3", parse_poly("y^2+x^3", G), [([0, 0, -1], [0, 0, 0, 1])])]),
        ("d(y^3+x^4)", parse_one_form("(4*x^3) dx + (3*y^2) dy"), []),
        ("takens (3,2,1)", takens_form(TakensSpec(3, 2, (1,))), []),
        ("takens (5,3,1)", takens_form(TakensSpec(5, 3, (1,))), []),
        ("takens (4,2,1)", takens_form(TakensSpec(4, 2, (1,))), []),
        ("takens (6,2,1+x)", takens_form(TakensSpec(6, 2, (1, 1))), []),
        ("omega_a(1)", family_generator("omega_a", {"a": mpq(1)}), []),
        ("example_b(3)", family_generator("example_b", {"b": mpq(3)}), []),
        ("nilpotent_3param(1,2,1)",
         family_generator("nilpotent_3param", {"a1": mpq(1), "a2": mpq(2), "a3": mpq(1)}), []),
        ("radial (dicritical)", parse_one_form("(y) dx + (-x) dy"), []),
    ]


def family_files():
    """(file name, .fol text) for the default family corpus."""
    from .elimination import default_family_instances, family_generator

    out = []
    counts = {}
    for fid, params in default_family_instances():
        counts[fid] = counts.get(fid, 0) + 1
        if fid == "omega_a" and params == {"a": 1}:
            fname = "omega_a_1.fol"
        else:
            stem = {"nilpotent_4param": "nilpotent4", "nilpotent_3param": "nilpotent3"}.get(fid, fid)
            fname = f"{stem}_{counts[fid]:04d}.fol"
        out.append((fname, write_fol(fid, family_generator(fid, params), params)))
    return out


def write_corpus(directory: str):
    os.makedirs(directory, exist_ok=True)
    names = []
    for fname, text in family_files():
        with open(os.path.join(directory, fname), "w", encoding="utf-8") as fh:
            fh.write(text)
        names.append(fname)
    return names


def log_foliation_corpus(count: int = 20, seed: int = 8):
    """Alternating degree 1 and 2 logarithmic foliations with rational,
    non-degenerate singular points."""
    from .globalcheck import random_log_foliation

    rng = random.Random(seed)
    return [random_log_foliation(rng, 1 + k % 2) for k in range(count)]
