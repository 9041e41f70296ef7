#include "cnls/conservation.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "cnls/error.hpp"
#include "cnls/format.hpp"
#include "cnls/spectral.hpp"
#include "cnls/summation.hpp"

namespace cnls {
namespace {

RealBuffer scalar(double v) { return RealBuffer{v}; }

}  // namespace

RealField DensitySet::t_jk(int j, int k) const {
  RealField out = l_at(j, k);
  if (j == k) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += 2.0 * g[i];
  }
  return out;
}

DensitySet densities(const ComplexField& u, Coupling mu) {
  require_spatial(u, "densities");
  SliceQuantities q(u, mu);
  const auto& grad = q.grad();
  const double s = coupling_sign(mu);
  RealField energy(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double z = q.rho()[i];
    const double kinetic = std::norm(grad[0][i]) + std::norm(grad[1][i]) + std::norm(grad[2][i]);
    energy[i] = 0.5 * kinetic + s * z * z * z / 6.0;
  }
  return DensitySet{q.rho(), q.t0j(), q.l(), q.g(), std::move(energy)};
}

double total_mass(const ComplexField& u) {
  const double n = l2_norm(u);
  return n * n;
}

Vec3 total_momentum(const ComplexField& u) {
  require_spatial(u, "total_momentum");
  const auto grad = gradient(u);
  Vec3 p{};
  for (int j = 0; j < 3; ++j) {
    p[j] = u.grid().cell_volume() * pairwise_sum(u.size(), [&](std::size_t i) {
             return 2.0 * std::imag(std::conj(u[i]) * grad[j][i]);
           });
  }
  return p;
}

double total_energy(const ComplexField& u, Coupling mu) {
  require_spatial(u, "total_energy");
  const double h1 = sobolev_norm(u, 1.0, true);
  const double l6 = u.grid().cell_volume() * pairwise_sum(u.size(), [&](std::size_t i) {
                      const double z = std::norm(u[i]);
                      return z * z * z;
                    });
  return 0.5 * h1 * h1 + coupling_sign(mu) * l6 / 6.0;
}

RealField mass_bracket(const ComplexField& f, const ComplexField& g) {
  require_same_grid(f.grid(), g.grid(), "mass_bracket");
  require_spatial(f, "mass_bracket");
  require_spatial(g, "mass_bracket");
  RealField out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = std::imag(f[i] * std::conj(g[i]));
  return out;
}

VectorField momentum_bracket(const ComplexField& f, const ComplexField& g) {
  require_same_grid(f.grid(), g.grid(), "momentum_bracket");
  require_spatial(f, "momentum_bracket");
  require_spatial(g, "momentum_bracket");
  const auto gf = gradient(f);
  const auto gg = gradient(g);
  VectorField out{RealField(f.grid()), RealField(f.grid()), RealField(f.grid())};
  for (int j = 0; j < 3; ++j) {
    for (std::size_t i = 0; i < f.size(); ++i) {
      out[j][i] = std::real(f[i] * std::conj(gg[j][i]) - g[i] * std::conj(gf[j][i]));
    }
  }
  return out;
}

BracketCancellation bracket_cancellation(const ComplexField& field) {
  const ComplexField u = field.is_spatial() ? field : to_spatial(field);
  const ComplexField n = nonlinearity(u, Coupling::Defocusing);
  BracketCancellation out;
  const RealField m = mass_bracket(n, u);
  double scale = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    out.mass_max = std::max(out.mass_max, std::abs(m[i]));
    scale = std::max(scale, std::abs(n[i]) * std::abs(u[i]));
  }
  out.mass_max = scale > 0.0 ? out.mass_max / scale : 0.0;

  const VectorField p = momentum_bracket(n, u);
  RealField sixth(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) sixth[i] = std::pow(std::norm(u[i]), 3);
  double res = 0.0, ref = 0.0;
  for (int j = 0; j < 3; ++j) {
    const RealField d = real_derivative(sixth, j);
    res += pairwise_sum(u.size(), [&](std::size_t i) {
      const double e = p[j][i] + 2.0 / 3.0 * d[i];
      return e * e;
    });
    ref += pairwise_sum(u.size(), [&](std::size_t i) {
      const double e = 2.0 / 3.0 * d[i];
      return e * e;
    });
  }
  out.momentum_residual = ref > 0.0 ? std::sqrt(res / ref) : std::sqrt(res);
  return out;
}

std::vector<CheckReport> check_bracket_cancellation(const FieldSeries& series) {
  if (series.empty()) throw ContractViolation("bracket cancellation needs records");
  BracketCancellation worst;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const BracketCancellation b = bracket_cancellation(series[i]);
    worst.mass_max = std::max(worst.mass_max, b.mass_max);
    worst.momentum_residual = std::max(worst.momentum_residual, b.momentum_residual);
  }
  CheckReport m = CheckReport::from_norms("mass_bracket_cancellation", worst.mass_max, 1.0);
  CheckReport p =
      CheckReport::from_norms("momentum_bracket_cancellation", worst.momentum_residual, 1.0);
  m.metadata["records"] = p.metadata["records"] = std::to_string(series.size());
  return {m, p};
}

// ---------------------------------------------------------------------------

IdentityMonitor local_mass_monitor(Coupling) {
  return IdentityMonitor("local_mass", [](double, SliceQuantities& q) {
    const auto& t0j = q.t0j();
    const RealField div = real_divergence(t0j[0], t0j[1], t0j[2]);
    const RealField& bracket = q.mass_bracket();
    IdentitySlice s;
    s.cell_weight = q.grid().cell_volume();
    RealBuffer rhs(div.size());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = -div[i] + 2.0 * bracket[i];
    s.lhs.push_back(q.rho().data);
    s.rhs.push_back(std::move(rhs));
    return s;
  });
}

IdentityMonitor local_momentum_monitor(Coupling) {
  return IdentityMonitor("local_momentum", [](double, SliceQuantities& q) {
    const auto& l = q.l();
    const RealField& g = q.g();
    IdentitySlice s;
    s.cell_weight = q.grid().cell_volume();
    for (int j = 0; j < 3; ++j) {
      std::array<RealField, 3> row{l[static_cast<std::size_t>(sym_index(j, 0))],
                                   l[static_cast<std::size_t>(sym_index(j, 1))],
                                   l[static_cast<std::size_t>(sym_index(j, 2))]};
      for (std::size_t i = 0; i < g.size(); ++i) row[j][i] += 2.0 * g[i];
      const RealField div = real_divergence(row[0], row[1], row[2]);
      RealBuffer rhs(div.size());
      for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = -div[i];
      s.lhs.push_back(q.t0j()[j].data);
      s.rhs.push_back(std::move(rhs));
    }
    return s;
  });
}

IdentityMonitor local_energy_monitor(Coupling) {
  return IdentityMonitor("local_energy", [](double, SliceQuantities& q) {
    const Grid& grid = q.grid();
    const ComplexField& u = q.u();
    const double sign = coupling_sign(q.mu());
    const auto& grad = q.grad();
    VectorField flux{RealField(grid), RealField(grid), RealField(grid)};
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) {
        const ComplexField& ukj = q.hessian(k, j);
        for (std::size_t i = 0; i < u.size(); ++i) {
          flux[j][i] += std::imag(std::conj(grad[k][i]) * ukj[i]);
        }
      }
      for (std::size_t i = 0; i < u.size(); ++i) {
        const double z = std::norm(u[i]);
        flux[j][i] -= sign * z * z * std::imag(u[i] * std::conj(grad[j][i]));
      }
    }
    const RealField div = real_divergence(flux[0], flux[1], flux[2]);
    IdentitySlice s;
    s.cell_weight = grid.cell_volume();
    RealBuffer e(u.size()), rhs(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double z = std::norm(u[i]);
      const double kinetic = std::norm(grad[0][i]) + std::norm(grad[1][i]) + std::norm(grad[2][i]);
      e[i] = 0.5 * kinetic + sign * z * z * z / 6.0;
      rhs[i] = -div[i];
    }
    s.lhs.push_back(std::move(e));
    s.rhs.push_back(std::move(rhs));
    return s;
  });
}

IdentityMonitor frequency_localized_mass_monitor(const DyadicBand& cutoff, Coupling mu) {
  if (cutoff.kind != DyadicBand::Kind::AboveEq) {
    throw ContractViolation("frequency-localized mass check needs an AboveEq cutoff");
  }
  struct Track {
    bool started = false;
    double first = 0.0, worst = 0.0, last_t = 0.0, last_rate = 0.0, leak = 0.0;
  };
  auto track = std::make_shared<Track>();
  IdentityMonitor monitor(
      "frequency_localized_mass", [cutoff, mu, track](double t, SliceQuantities& q) {
        const ComplexField& u = q.u();
        const ComplexField hi = lp_project(u, cutoff);
        const ComplexField forcing = lp_project(q.nonlinearity(), cutoff);
        const double cell = u.grid().cell_volume();
        const double mass_hi = total_mass(hi);
        // 2 {P_hi N - N(u_hi), u_hi}_m + 2 {N(u_hi), u_hi}_m; the second is 0.
        const ComplexField n_hi = nonlinearity(hi, mu);
        const double a = cell * pairwise_sum(u.size(), [&](std::size_t i) {
                           return 2.0 * std::imag((forcing[i] - n_hi[i]) * std::conj(hi[i]));
                         });
        const double b = cell * pairwise_sum(u.size(), [&](std::size_t i) {
                           return 2.0 * std::imag(n_hi[i] * std::conj(hi[i]));
                         });
        const double rate = a + b;
        if (!track->started) {
          track->started = true;
          track->first = mass_hi;
        } else {
          track->leak += 0.5 * (t - track->last_t) * (std::abs(rate) + std::abs(track->last_rate));
        }
        track->worst = std::max(track->worst, std::abs(mass_hi - track->first));
        track->last_t = t;
        track->last_rate = rate;
        IdentitySlice s;
        s.lhs.push_back(scalar(mass_hi));
        s.rhs.push_back(scalar(rate));
        return s;
      });
  monitor.set_finalizer([track, cutoff](CheckReport& r) {
    r.metadata["cutoff_N"] = fmt_double(cutoff.n);
    r.metadata["band_mass_initial"] = fmt_double(track->first);
    r.metadata["band_mass_variation"] =
        fmt_double(track->first > 0.0 ? track->worst / track->first : track->worst);
    r.metadata["mass_leak"] = fmt_double(track->leak);
  });
  return monitor;
}

namespace {
CheckReport run_with(IdentityMonitor monitor, const FieldSeries& series, Coupling mu) {
  CheckReport r = run_monitor(monitor, series, mu);
  r.metadata["mu"] = std::to_string(static_cast<int>(mu));
  return r;
}
}  // namespace

CheckReport check_local_mass(const FieldSeries& series, Coupling mu) {
  return run_with(local_mass_monitor(mu), series, mu);
}

CheckReport check_local_momentum(const FieldSeries& series, Coupling mu) {
  return run_with(local_momentum_monitor(mu), series, mu);
}

CheckReport check_local_energy(const FieldSeries& series, Coupling mu) {
  return run_with(local_energy_monitor(mu), series, mu);
}

CheckReport frequency_localized_mass_check(const FieldSeries& series, const DyadicBand& cutoff,
                                           Coupling mu) {
  return run_with(frequency_localized_mass_monitor(cutoff, mu), series, mu);
}

}  // namespace cnls
