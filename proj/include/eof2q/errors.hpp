#pragma once

#include <stdexcept>

namespace eof2q {

// Base class for all library errors.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct not_hermitian : error { using error::error; };
struct not_positive : error { using error::error; };
struct not_symmetric : error { using error::error; };
struct not_normalized : error { using error::error; };
struct zero_norm : error { using error::error; };
struct out_of_range : error { using error::error; };
struct invalid_density_matrix : error { using error::error; };
struct not_isometry : error { using error::error; };
struct target_unreachable : error { using error::error; };
struct no_closure : error { using error::error; };
struct wrong_case : error { using error::error; };
struct too_few_members : error { using error::error; };

}  // namespace eof2q
