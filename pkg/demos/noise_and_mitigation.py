"""
Readout errors, depolarizing noise and what mitigation buys back
=================================================================

Each grid point is a handful of tomography circuits. Symmetric readout flips
shrink every Pauli expectation by the same factor 1 - 2q. Purification
(on by default) rescales the Bloch vector to unit length and so already
removes that bias; confusion-matrix inversion matters once purification is
off. Depolarizing noise is not mitigated.
"""

from qgtprobe.sweep import RunConfig, chern, sweep

base = dict(method="vqa", m=1.25, grid_n=9, shots=20_000)

for label, extra in [
    ("noiseless", {}),
    ("readout q=0.05", dict(readout_q=0.05)),
    ("readout q=0.05, mitigated", dict(readout_q=0.05, mitigate=True)),
    ("depolarizing p=0.02", dict(depolarizing_p=0.02)),
]:
    res = sweep(RunConfig(**base, **extra))
    print(f"{label:<28} {chern(res, skip_nonfinite=True)}   flagged {len(res.flagged())}")

print("\nwithout purification the state stays mixed and |C| shrinks")
for label, extra in [
    ("readout q=0.05", dict(readout_q=0.05)),
    ("readout q=0.05, mitigated", dict(readout_q=0.05, mitigate=True)),
    ("depolarizing p=0.02", dict(depolarizing_p=0.02)),
]:
    res = sweep(RunConfig(**base, **extra, purify=False))
    print(f"{label:<28} {chern(res, skip_nonfinite=True)}")
