"""Published inputs and reference values for the G centre in silicon.

Potentials are (path length sqrt(u) A, barrier meV). Tensors are in MHz with
principal values on the defect x, y, z axes.
"""

from .rotor import RotorPotential
from .tensor import SymTensor3

GROUND_STATE = RotorPotential(L=31.97, V0=89.0, N=6)
TRIPLET_STATE = RotorPotential(L=25.7, V0=40.0, N=6)
SINGLET_EXCITED_STATE = RotorPotential(L=22.5, V0=33.0, N=6)

POTENTIALS = {
    "ground": GROUND_STATE,
    "triplet": TRIPLET_STATE,
    "singlet": SINGLET_EXCITED_STATE,
}

# Calculated (HSE06+U) and measured spin tensors.
D_CALCULATED = SymTensor3.diagonal(xx=307.0, yy=911.0, zz=-1218.0)
D_MEASURED_MAGNITUDES = (142.0, 800.0, 941.0)
A_CALCULATED = SymTensor3.diagonal(xx=-267.0, yy=-324.0, zz=-347.0)
A_MEASURED = SymTensor3.diagonal(xx=273.0, yy=312.0, zz=339.0)
D_AVERAGED_CALCULATED = 1365.0
D_AVERAGED_MEASURED = 1210.0

SINGLET_DELTA_UEV = 2.5
TRIPLET_DELTA_UEV = 0.22
ATHERMAL_RATE_GHZ = 0.321
ACTIVATION_MEV = 12.4
ZPL_EV = 0.97
ISOTOPE_SHIFTS_UEV = {29.0: 54.0, 30.0: 106.0}

ODMR_PROBE_GHZ = 35.0
ODMR_FIELD_DIRECTION = (0.0, 1.0, 1.0)
TRIGONAL_ONSET_K = 5.0
