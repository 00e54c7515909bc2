#pragma once

#include "weiermnv/kernels.hpp"

namespace wmnv::kernels::detail {

extern const KernelTable kScalarTable;
#if defined(WMNV_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif

} // namespace wmnv::kernels::detail
