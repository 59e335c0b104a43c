#include "donorqed/trace.hpp"

#include "donorqed/io.hpp"

#include <ostream>

namespace donorqed {

void SignalTrace::write_csv(std::ostream& os) const {
  os << "x,y,stderr\n";
  for (std::size_t i = 0; i < x.size(); ++i)
    os << io::format_double(x[i]) << ',' << io::format_double(y[i]) << ','
       << io::format_double(i < stderror.size() ? stderror[i] : 0.0) << '\n';
}

}  // namespace donorqed
