"""Associated function of a weight sequence, computed three ways.

Uses M_p = p! and shows that the straight supremum scan, the piecewise
closed form, and the integral closed form produce the same values, that the
counting function steps exactly at the quotients, and that dropping the M_0
factor shifts the whole function by log M_0.
"""

import math
from fractions import Fraction

import numpy as np

from seqreg import (
    FactorialPower,
    SequenceSpec,
    counting_function,
    omega_direct,
    omega_integral,
    omega_piecewise,
    omega_tilde,
)


def main() -> None:
    factorial = SequenceSpec(kind="weight", prefix=(1,),
                             tail=FactorialPower(s=1, c=1))

    print("M_p = p!, omega(t) = sup_p log(t^p / M_p)")
    print(f"{'t':>8} {'direct':>12} {'piecewise':>12} {'integral':>12} {'argmax':>6}")
    for t in np.geomspace(0.25, 32.0, num=8):
        t = Fraction(t).limit_denominator(64)
        d = omega_direct(factorial, t, window=64)
        pw = omega_piecewise(factorial, t, window=64)
        itg = omega_integral(factorial, t, window=64)
        print(f"{str(t):>8} {float(d.value):>12.6f} {float(pw):>12.6f} "
              f"{float(itg):>12.6f} {d.argmax_index:>6}")

    m = counting_function(factorial, window=8)
    print("counting function m(t) = #{p >= 1 : M_p/M_{p-1} <= t}:")
    print("  jumps at:", [(str(x), level) for x, level in m.jumps])
    print(f"  m(2.5) = {m.value(Fraction(5, 2))}, m(3) = {m.value(3)}, "
          f"left limit at 3 = {m.left_limit(3)}")

    # scaling the whole sequence by M_0 shifts omega but not omega-tilde
    scaled = SequenceSpec(kind="weight", prefix=(7,),
                          tail=FactorialPower(s=1, c=7))
    t = Fraction(3)
    full = float(omega_direct(scaled, t, window=64).value)
    tilde = float(omega_tilde(scaled, t, window=64))
    print(f"M_0 = 7: omega(3) - omega~(3) = {full - tilde:.12f} "
          f"(log 7 = {math.log(7):.12f})")


if __name__ == "__main__":
    main()
