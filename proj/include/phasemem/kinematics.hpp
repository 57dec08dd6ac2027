#pragma once

namespace phasemem {

namespace constants {
inline constexpr double hbar_mev_s = 6.582119569e-22;  ///< hbar in MeV*s
inline constexpr double hbar_c_mev_fm = 197.327;       ///< hbar*c in MeV*fm
inline constexpr double amu_mev = 931.494;             ///< atomic mass unit in MeV/c^2
}  // namespace constants

/// Linearized spin-window kinematics around the center energy.
struct WindowKinematics {
    double i_bar = 36.0;    ///< spin at the center energy
    double e_bar = 53.0;    ///< center energy, MeV
    double barrier = 0.0;   ///< Coulomb barrier, MeV (user supplied)
    double g = 1.0;         ///< J-window width

    void validate() const;
};

struct SpinWindowParams {
    double center_spin;  ///< I(E)
    double delta_e;      ///< 2 (E_bar - B) / I_bar, MeV
    double d;            ///< g / |1 - hw/dE|
};

/// I(E) = I_bar + I_bar (E - E_bar) / dE and the effective width d.
/// Throws DomainError when |1 - hbar_omega/dE| < 1e-9.
SpinWindowParams spin_window_params(const WindowKinematics& k, double hbar_omega, double e);

/// I(E) alone; unlike spin_window_params it has no singularity in hbar_omega.
double window_center(const WindowKinematics& k, double e);

struct RotorGeometry {
    int a1 = 24;
    int a2 = 28;
    double r0 = 1.2;  ///< fm
    bool include_sphere_self_inertia = true;

    void validate() const;
};

enum class Elongation { touching_spheres };

struct RotorReport {
    double reduced_mass;      ///< MeV/c^2
    double separation;        ///< center distance R, fm
    double orbital_inertia;   ///< mu R^2, MeV/c^2 fm^2
    double self_inertia;      ///< sum of (2/5) M_i R_i^2, zero when excluded
    double total_inertia;
    double hbar_omega;        ///< MeV
};

/// Rigid-rotor quantum hbar^2 j / inertia for two touching spheres.
RotorReport rotor_frequency(const RotorGeometry& geom, double j,
                            Elongation elongation = Elongation::touching_spheres);

}  // namespace phasemem
