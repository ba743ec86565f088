"""The two non-standard regimes side by side.

Case 1: a_p / p -> -inf.  Every slope is eventually undercut, so the
regularization collapses to (a_0, -inf, -inf, ...); in the weight scale that
is (M_0, 0, 0, ...).

Case 2: a_p / p stays bounded with limit slope a_iota.  Chords steeper than
the cap are never accepted; the construction closes with the line of slope
a_iota through the last accepted point.  The instance here is a_0 = 0,
a_1 = -1, a_p = p for p >= 2, whose regularization is p - 2 past the origin.
"""

import math
from fractions import Fraction

from seqreg import (
    AffineLog,
    Expression,
    ExplicitOnly,
    RegimeClassification,
    SequenceSpec,
    case1_regularize,
    case2_limit_check,
    case2_regularize,
    classify_regime,
    ext,
    log_convex_minorant,
)


def main() -> None:
    collapsing = SequenceSpec(
        kind="log", prefix=(2,),
        tail=Expression(fn=lambda p: ext(-p * p), native="log", formula="-p*p"))
    regime = classify_regime(collapsing, window=12)
    print(f"a_p = -p^2 (a_0 = 2): regime {regime.regime}")
    r1 = case1_regularize(collapsing, window=8)
    print("  regularized:", [str(v) for v in r1.regularized.prefix])

    weights = SequenceSpec(
        kind="weight", prefix=(7,),
        tail=Expression(fn=lambda p: ext(Fraction(1, 2)) ** (p * p),
                        native="weight", formula="(1/2)**(p*p)"))
    w1 = log_convex_minorant(weights, window=8)
    print("  same in the weight scale (M_0 = 7):",
          [str(v) for v in w1.regularized.prefix])

    almost_affine = SequenceSpec(kind="log", prefix=(0, -1), tail=AffineLog(c=1))
    regime = classify_regime(almost_affine, window=16)
    print(f"a = (0, -1, 2, 3, 4, ...): regime {regime.regime}, "
          f"limit slope a_iota = {regime.a_iota}")
    r2 = case2_regularize(almost_affine, window=10)
    print("  regularized:", [str(v) for v in r2.regularized.prefix])
    print("  principal indices:", list(r2.principal_indices))
    ks = (-2, -1, Fraction(0), Fraction(1, 2))
    print("  trace A(k) at k = -2, -1, 0, 1/2:",
          [str(r2.trace.evaluate(k)) for k in ks])
    print(f"  left limit of A at the cap: {r2.trace.left_limit(1)}")

    # in the weight scale the regularized sequence approaches M_iota = e
    # from below, but slowly: the 64th root is still 8.4e-2 away
    n = 65
    exp_weights = SequenceSpec(
        kind="weight",
        prefix=tuple(ext(v).exp() for v in [0, -1] + list(range(2, n))),
        tail=ExplicitOnly(),
        declared_regime=RegimeClassification(
            regime="case2", a_iota=ext(1), evidence_window=(0, n),
            source="declared"))
    report = case2_limit_check(exp_weights, window=n, tol=1e-1)
    root = float(report.root_at_window_end)
    print(f"(M^lc_64)^(1/64) = {root:.6f} vs e = {math.e:.6f} "
          f"(gap {abs(root - math.e):.6f}, within 0.1: {report.within_tol})")


if __name__ == "__main__":
    main()
