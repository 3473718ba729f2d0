GRAVITY = 9.81
# depth below which velocities are desingularised; also the wet/dry threshold
DRY_DEPTH = 1e-6
# regulariser in the gradient weights
GRADIENT_XI = 1e-7
# b_in + b_out below this is treated as a zero-speed interface
MIN_SPEED_SUM = 1e-10
