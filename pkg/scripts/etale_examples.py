#!/usr/bin/env python3
"""Étale verdicts, fiber complexes and tangent base change for the sample quotients."""
from stackycdga import samples
from stackycdga.cdga import structure_map
from stackycdga.etale import check_etale
from stackycdga.totalization import tangent_base_change

CASES = [
    ("[G_m/gl_1]", samples.gm_over_gl1),
    ("[G_a/Lie G_a]", samples.ga_over_lie),
    ("Q[x] with trivial action", samples.trivial_action_line),
    ("de Rham of A^1", lambda: samples.de_rham_affine(1)),
    ("de Rham of A^2", lambda: samples.de_rham_affine(2)),
]


def main():
    for label, make in CASES:
        f = structure_map(make())
        rep = check_etale(f)
        print(f"== {label}: {'etale' if rep.etale else 'not etale'}")
        M = rep.fiber_complex
        for j, b in enumerate(M.basis):
            print(f"   d {b.name} = {M.format_vector(M.d_basis(j)) or '0'}")
        if rep.acyclicity.homotopy is not None:
            print(f"   homotopy: {rep.acyclicity.homotopy}")
        if rep.acyclicity.cohomology_class is not None:
            print(f"   class: {rep.acyclicity.cohomology_class}")
        tb = tangent_base_change(f, weight_bound=3)
        print(f"   tangent base change: {tb.verdict.value} ({tb.message})")


if __name__ == "__main__":
    main()
