"""Measures behind the slit maps.

r_n(0; .) is the reciprocal Cauchy transform of the arcsine law on
[-2/sqrt(n), 2/sqrt(n)]; for a != 0, r_n(a; .) belongs to a deformed arcsine
law with an atom.  Composing reciprocal transforms is monotone convolution.
"""
import numpy as np

from discrete_loewner import (
    CompactMeasure,
    SlitChain,
    SlitParams,
    cauchy_transform,
    eval_chain,
    eval_slit,
    monotone_convolve,
    reciprocal_cauchy,
    stieltjes_invert,
)

arc = CompactMeasure.arcsine(1)
z = np.array([1j, 1 + 0.2j])
print("f_arcsine(z) =", np.round(reciprocal_cauchy(arc, z), 10))
print("r_1(0; z)    =", np.round(eval_slit(SlitParams(0, 1), z), 10))
print("mass recovered by Stieltjes inversion:",
      round(stieltjes_invert(lambda w: cauchy_transform(arc, w), (-2.5, 2.5)), 7))

dev = CompactMeasure.slit(1, a=1.0)
print("deformed law for a=1: atom", dev.edge_atom, "support", dev.support)

lam = monotone_convolve(arc, arc)
print(f"arcsine |> arcsine: mean {lam.mean:+.2e}, variance {lam.variance:.4f}")
print("arcsine |> delta_1 is the shifted arcsine:", monotone_convolve(arc, CompactMeasure.point(1.0)).to_dict())

# the law of the two-slit chain map r(0) o r(2) is the monotone convolution
# of the two single-slit laws
two = monotone_convolve(CompactMeasure.slit(1, 0.0), CompactMeasure.slit(1, 2.0))
grid = np.linspace(-4, 6, 6) + 1j
chain = eval_chain(SlitChain(1, [0.0, 2.0]), grid)
print("max |f_lambda - r(0) o r(2)| on Im z = 1:", round(float(np.max(np.abs(reciprocal_cauchy(two, grid) - chain))), 4))
