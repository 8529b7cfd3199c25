"""Slit maps and their compositions.

r_n(a; z) = a + sqrt((z - a)**2 - 4/n) sends the upper half-plane onto the
half-plane minus a vertical slit of height 2/sqrt(n) standing on a.  A walk
S(0), S(1), ... turns into the chain D(m) = r(S(0)) o ... o r(S(m-1)).
"""
import numpy as np

from discrete_loewner import SlitChain, SlitParams, eval_chain, eval_slit, eval_slit_inverse

p = SlitParams(a=0.0, n=1)
print("r(0; i)      =", eval_slit(p, 1j))          # i sqrt(5)
print("r(0; 0)      =", eval_slit(p, 0.0))         # tip of the slit, 2i
print("r^-1(0; 2i)  =", eval_slit_inverse(p, 2j))  # back to the base point

# the real line wraps around the slit: [-2, 2] goes onto both sides of it
x = np.linspace(-3, 3, 7)
print("boundary values:", np.round(eval_slit(p, x), 4))

# a two-slit chain; the newest slit is applied first
c = SlitChain(1, [0.0, 2.0])
print("D(2; 2)      =", eval_chain(c, 2.0))

# scaling: D_n(S_n; z/sqrt(n)) = D_1(S_1; z)/sqrt(n) with S_n = S_1/sqrt(n)
s1 = np.array([0.0, 1.0, -1.0, 0.0])
z = 0.4 + 1.1j
for n in (1, 4, 16):
    lhs = eval_chain(SlitChain(n, s1 / np.sqrt(n)), z / np.sqrt(n))
    print(f"n={n:2d}: sqrt(n) D_n(z/sqrt(n)) = {np.sqrt(n) * lhs:.12f}")
