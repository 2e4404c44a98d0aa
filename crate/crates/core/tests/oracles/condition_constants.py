"""Independent high-precision evaluation of the condition constants for the
two bundled examples. Run with `python3 condition_constants.py`; the printed
values are frozen in tests/acceptance.rs."""

from mpmath import mp, gamma, mpf

mp.dps = 40

def psi(t):
    return 3 * t**2

W = psi(mpf(1)) - psi(mpf(0))

def coeff(order, mult, point):
    delta = mult * (psi(point) - psi(mpf(0))) - W
    return (W**order + (abs(mult) + 1) / abs(delta) * W**(order + 1)) / gamma(order + 1), delta

alpha, beta = mpf(3) / 2, mpf(4) / 3
A, d1 = coeff(alpha, mpf(1), mpf(1) / 2)
B, d2 = coeff(beta, mpf(1), mpf(1) / 3)

k = [mpf(1) / 25, mpf(1) / 200, mpf(1) / 300]
l = [mpf(1) / 80, mpf(1) / 270, mpf(1) / 180]

print("delta1", d1)
print("delta2", d2)
print("A", A)
print("B", B)
print("gamma3", A / 75)
print("gamma4", B / 100)
print("gamma3+gamma4", A / 75 + B / 100)
print("omega0 corrected", A * k[0] + B * l[0])
print("omega0 literal", (A + B) * l[0])
print("omega1", A * k[1] + B * l[1])
print("omega2", A * k[2] + B * l[2])
