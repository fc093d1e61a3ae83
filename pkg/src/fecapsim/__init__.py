"""Device-to-system workbench for a ferroelectric charge-domain attention substrate.

Modules: device (cell physics), noise (column noise budget), tile (tile and
per-token energy), cache (volatile vs nonvolatile cache energetics), serving
(per-served-token simulation), kernel (noisy quantized matmul/attention
emulation), wta (stochastic winner-take-all softmax), config/report/reproduce
(workbench plumbing), cli (front end).
"""

__version__ = "0.1.0"
