import numpy as np

from kernelkoop import MarkerFrame

THIGH = 0.45
SHANK = 0.43


def gait_angles(n_frames=240, n_cycles=3):
    """Smooth closed loop in (hip, knee) angle space, traversed n_cycles times."""
    phase = 2.0 * np.pi * n_cycles * np.arange(n_frames) / n_frames
    theta1 = 0.55 * np.sin(phase)
    theta2 = 0.8 + 0.5 * np.cos(phase)
    return theta1, theta2


def leg_markers_2d(theta1, theta2):
    """Planar (forward, up) hip/knee/ankle for a 2-link leg at the given angles.

    The thigh direction makes angle theta1 with body-down (forward positive);
    the shank bends backward by the interior knee angle theta2.
    """
    hip = np.zeros((theta1.size, 2))
    knee = hip + THIGH * np.column_stack([np.sin(theta1), -np.cos(theta1)])
    shank_dir = theta1 - theta2
    ankle = knee + SHANK * np.column_stack([np.sin(shank_dir), -np.cos(shank_dir)])
    return hip, knee, ankle


def synthetic_gait_frames(n_frames=240, n_cycles=3, lateral=0.12):
    """3-D marker frames (x forward, y mediolateral, z up) tracing a gait loop."""
    theta1, theta2 = gait_angles(n_frames, n_cycles)
    hip, knee, ankle = leg_markers_2d(theta1, theta2)

    def lift(planar, i):
        return np.array([planar[i, 0], lateral, planar[i, 1]])

    return [
        MarkerFrame(t=i, hip=lift(hip, i), knee=lift(knee, i), ankle=lift(ankle, i))
        for i in range(n_frames)
    ]


def write_marker_csv(path, frames):
    lines = ["t,hip_x,hip_y,hip_z,knee_x,knee_y,knee_z,ankle_x,ankle_y,ankle_z"]
    for f in frames:
        cells = [str(f.t)] + [repr(float(v)) for m in (f.hip, f.knee, f.ankle) for v in m]
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n")
