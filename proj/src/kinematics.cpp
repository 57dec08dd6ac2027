#include "phasemem/kinematics.hpp"

#include <cmath>

#include "phasemem/errors.hpp"

namespace phasemem {

void WindowKinematics::validate() const {
    if (!(i_bar > 0.0)) throw DomainError("i_bar must be > 0");
    if (!(e_bar > barrier)) throw DomainError("center energy must exceed the Coulomb barrier");
    if (!(g > 0.0)) throw DomainError("window width g must be > 0");
}

SpinWindowParams spin_window_params(const WindowKinematics& k, double hbar_omega, double e) {
    k.validate();
    const double delta_e = 2.0 * (k.e_bar - k.barrier) / k.i_bar;
    const double denom = std::abs(1.0 - hbar_omega / delta_e);
    if (denom < 1e-9) throw DomainError("hbar_omega equals the window energy scale; d is singular");
    return {k.i_bar + k.i_bar * (e - k.e_bar) / delta_e, delta_e, k.g / denom};
}

double window_center(const WindowKinematics& k, double e) {
    k.validate();
    const double delta_e = 2.0 * (k.e_bar - k.barrier) / k.i_bar;
    return k.i_bar + k.i_bar * (e - k.e_bar) / delta_e;
}

void RotorGeometry::validate() const {
    if (a1 <= 0 || a2 <= 0) throw DomainError("mass numbers must be positive");
    if (!(r0 >= 1.0 && r0 <= 1.5)) throw DomainError("r0 must lie in [1.0, 1.5] fm");
}

RotorReport rotor_frequency(const RotorGeometry& geom, double j, Elongation) {
    geom.validate();
    if (!(j >= 0.0)) throw DomainError("spin must be >= 0");
    const double m1 = constants::amu_mev * geom.a1;
    const double m2 = constants::amu_mev * geom.a2;
    const double r1 = geom.r0 * std::cbrt(static_cast<double>(geom.a1));
    const double r2 = geom.r0 * std::cbrt(static_cast<double>(geom.a2));

    RotorReport rep{};
    rep.reduced_mass = m1 * m2 / (m1 + m2);
    rep.separation = r1 + r2;
    rep.orbital_inertia = rep.reduced_mass * rep.separation * rep.separation;
    rep.self_inertia = geom.include_sphere_self_inertia ? 0.4 * (m1 * r1 * r1 + m2 * r2 * r2) : 0.0;
    rep.total_inertia = rep.orbital_inertia + rep.self_inertia;
    rep.hbar_omega = constants::hbar_c_mev_fm * constants::hbar_c_mev_fm * j / rep.total_inertia;
    return rep;
}

}  // namespace phasemem
