"""Walk through the convex floor of a small rough sequence.

The running example is the log sequence (0, 5, 1, 3, 9, 20): entry 1 pokes
above every line its neighbours allow, so the regularization pulls it down to
the chord midpoint 1/2 and leaves everything else alone.
"""

from fractions import Fraction

from seqreg import (
    ExplicitOnly,
    SequenceSpec,
    brute_minorant,
    classify_regime,
    convex_minorant,
    support_line,
)

ROUGH = (0, 5, 1, 3, 9, 20)


def main() -> None:
    spec = SequenceSpec(kind="log", prefix=ROUGH, tail=ExplicitOnly())

    regime = classify_regime(spec)
    print(f"input prefix      : {list(ROUGH)}")
    print(f"regime            : {regime.regime} (source: {regime.source})")

    result = convex_minorant(spec)
    fixed = [str(v) for v in result.regularized.prefix]
    print(f"regularized       : {fixed}")
    print(f"principal indices : {list(result.principal_indices)}")
    print(f"edge slopes       : {[str(e.slope) for e in result.edges]}")
    print(f"stable through    : index {result.stable_prefix} "
          f"(provisional from {result.provisional_from})")

    # the trace stores the same data as a function of the slope: its value at
    # k is the largest intercept shift -c such that slope-k lines stay below
    ks = (-1, Fraction(1, 2), 2, 5)
    print("trace A(k) at k = -1, 1/2, 2, 5:",
          [str(result.trace.evaluate(k)) for k in ks])

    line = support_line(spec, 3)
    print(f"support line k=3  : intercept {line.intercept}, "
          f"touches indices {list(line.touching)}")

    oracle = brute_minorant(list(ROUGH))
    agree = [v.raw for v in result.regularized.prefix] == oracle
    print(f"brute-force oracle agrees exactly: {agree}")


if __name__ == "__main__":
    main()
