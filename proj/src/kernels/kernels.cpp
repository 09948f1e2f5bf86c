#include "miseeker/kernels/kernels.hpp"

#include <cstdlib>

namespace miseeker::kernels {

#if defined(MISEEKER_HAVE_AVX2)
const Backend& avx2_backend();  // defined in kernels_avx2.cpp
#endif

namespace {

bool avx2_usable() {
#if defined(MISEEKER_HAVE_AVX2)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const Backend* pick_default() {
#if defined(MISEEKER_HAVE_AVX2)
  if (const char* env = std::getenv("MI_SEEKER_KERNELS")) {
    const std::string_view want(env);
    if (want == "scalar") return &scalar_backend();
    if (want == "avx2" && avx2_usable()) return &avx2_backend();
    // Unknown or unavailable request: fall through to autodetect.
  }
  if (avx2_usable()) return &avx2_backend();
#else
  (void)avx2_usable;
#endif
  return &scalar_backend();
}

const Backend*& current() {
  static const Backend* b = pick_default();
  return b;
}

}  // namespace

const Backend& active() { return *current(); }

bool set_active(std::string_view name) {
  if (name == "scalar") {
    current() = &scalar_backend();
    return true;
  }
#if defined(MISEEKER_HAVE_AVX2)
  if (name == "avx2" && avx2_usable()) {
    current() = &avx2_backend();
    return true;
  }
#endif
  return false;
}

std::vector<std::string> available() {
  std::vector<std::string> out{"scalar"};
  if (avx2_usable()) out.emplace_back("avx2");
  return out;
}

}  // namespace miseeker::kernels
