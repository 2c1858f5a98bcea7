from fractions import Fraction

HALF = Fraction(1, 2)

# Two weighted utility functionals sharing u and differing in the weight of w3.
EXAMPLE_U = (Fraction(0), Fraction(1), HALF)
EXAMPLE_G1 = (Fraction(1), Fraction(1), HALF)
EXAMPLE_G2 = (Fraction(1), Fraction(1), Fraction(2))
EXAMPLE_PIVOT_1 = (-HALF, -HALF)
EXAMPLE_PIVOT_2 = (Fraction(1), Fraction(1))
EXAMPLE_THRESHOLD = HALF

# Lotteries of the joint-choice divergence: p, q, p', q'.
JOINT_P = (Fraction(0), HALF)
JOINT_Q = (Fraction(1, 4), Fraction(3, 4))
JOINT_P2 = (HALF, Fraction(0))
JOINT_Q2 = (Fraction(3, 4), Fraction(1, 4))

DEFAULT_RADII = (0.8, 1.5)
DEFAULT_MOMENT_NODES = (
    Fraction(1, 3), Fraction(1, 2), Fraction(1), Fraction(2), Fraction(3), Fraction(1, 4), Fraction(3, 2),
)
