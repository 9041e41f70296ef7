#include "cnls/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

#include "cnls/error.hpp"

namespace cnls::fft {
namespace {

// FFTW's planner is not thread-safe; execution of an existing plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_plan plan_for(int n, int sign) {
  static std::map<std::pair<int, int>, fftw_plan> plans;
  std::lock_guard lock(planner_mutex());
  auto it = plans.find({n, sign});
  if (it != plans.end()) return it->second;
  ComplexBuffer scratch(static_cast<std::size_t>(n) * n * n);
  auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
  fftw_plan plan = fftw_plan_dft_3d(n, n, n, p, p, sign, FFTW_ESTIMATE);
  if (plan == nullptr) throw Error("FFTW could not create a plan");
  plans.emplace(std::make_pair(n, sign), plan);
  return plan;
}

enum class RealKind { Forward, Backward };

fftw_plan real_plan_for(int n, RealKind kind) {
  static std::map<std::pair<int, int>, fftw_plan> plans;
  std::lock_guard lock(planner_mutex());
  const int key = kind == RealKind::Forward ? 0 : 1;
  auto it = plans.find({n, key});
  if (it != plans.end()) return it->second;
  RealBuffer real(static_cast<std::size_t>(n) * n * n);
  ComplexBuffer half(half_size(n));
  auto* c = reinterpret_cast<fftw_complex*>(half.data());
  fftw_plan plan = kind == RealKind::Forward
                       ? fftw_plan_dft_r2c_3d(n, n, n, real.data(), c, FFTW_ESTIMATE)
                       : fftw_plan_dft_c2r_3d(n, n, n, c, real.data(), FFTW_ESTIMATE);
  if (plan == nullptr) throw Error("FFTW could not create a real plan");
  plans.emplace(std::make_pair(n, key), plan);
  return plan;
}

void execute(std::span<Complex> data, int n, int sign) {
  if (data.size() != static_cast<std::size_t>(n) * n * n) {
    throw ContractViolation("FFT buffer size does not match n^3");
  }
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan_for(n, sign), p, p);
}

}  // namespace

void forward(std::span<Complex> data, int n) { execute(data, n, FFTW_FORWARD); }
void backward(std::span<Complex> data, int n) { execute(data, n, FFTW_BACKWARD); }

void forward_real(std::span<const double> in, std::span<Complex> out, int n) {
  if (in.size() != static_cast<std::size_t>(n) * n * n || out.size() != half_size(n)) {
    throw ContractViolation("real FFT buffer sizes do not match n");
  }
  // FFTW does not write to the input of an out-of-place r2c transform.
  auto* src = const_cast<double*>(in.data());
  fftw_execute_dft_r2c(real_plan_for(n, RealKind::Forward), src,
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void backward_real(std::span<Complex> in, std::span<double> out, int n) {
  if (out.size() != static_cast<std::size_t>(n) * n * n || in.size() != half_size(n)) {
    throw ContractViolation("real FFT buffer sizes do not match n");
  }
  fftw_execute_dft_c2r(real_plan_for(n, RealKind::Backward),
                       reinterpret_cast<fftw_complex*>(in.data()), out.data());
}

}  // namespace cnls::fft
