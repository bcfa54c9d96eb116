"""Removing drift with the scale function.

The scale function p solves p' = exp(-2 integral mu/sigma^2), p(x0) = 0,
and Y = p(X) is a driftless diffusion started at 0. This demo builds p for
an Ornstein-Uhlenbeck model, checks it against the closed form, transforms
a path, and shows that the supremum location is preserved (p is strictly
increasing, so zooming at the supremum commutes with the transform).

Run:  python demos/scale_transform.py
"""

import numpy as np

from diffzoom import (SeedPlan, build_scale, builtin_model, simulate_path,
                      supremum, transform_model, transform_path)

theta, sigma0 = 1.0, 1.0
ou = builtin_model("ou", {"theta": theta, "sigma0": sigma0})
scale = build_scale(ou, (-4.0, 4.0))

xs = np.array([-2.0, -0.5, 0.0, 0.5, 2.0])
closed = np.exp(theta * xs ** 2 / sigma0 ** 2)
print("ou scale function, p'(x) vs the closed form exp(theta x^2 / sigma^2):")
for x, got, want in zip(xs, scale.derivative(xs), closed):
    print(f"  x = {x:+.1f}:  p' = {got:10.6f}   closed form {want:10.6f}")

driftless = transform_model(scale)
print(f"\ntransformed model: name = {driftless.name!r}, "
      f"drift(1.0) = {float(driftless.mu_at(1.0)):.1f}, "
      f"sigma_tilde(0) = {float(driftless.sigma_at(0.0)):.6f} "
      f"(equals sigma(x0) = {sigma0})")

path = simulate_path(ou, 1.0, 50_000, SeedPlan(8, 0))
ypath = transform_path(scale, path)
a, b = supremum(path), supremum(ypath)
print(f"\none path: argmax index {a.argmax_index} before transform, "
      f"{b.argmax_index} after (identical: p is increasing)")
print(f"sup before {a.sup_value:+.5f}, after {b.sup_value:+.5f} "
      f"= p(sup) = {float(scale.value(a.sup_value)):+.5f}")
