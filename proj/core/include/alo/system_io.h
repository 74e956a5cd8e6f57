#ifndef ALO_SYSTEM_IO_H_
#define ALO_SYSTEM_IO_H_

// Export formats for ConstraintSystem.
//
// MPS: fixed-format layout (fields start at columns 2, 5, 15, 25), one
// coefficient per line, objective sense MIN, all columns inside an
// INTORG/INTEND marker pair and bounded BV. Row names encode the row family
// ("P<id>", "B<j>", "W0", "CU1", "CL2", "SL<j>", "SR<j>", "MF<i>", "CW<i>"),
// column names are "Y<id>_<j>". Numbers are printed with 12 significant
// digits; names longer than 8 characters and wide numbers overflow their
// nominal columns, which whitespace-splitting readers accept.
//
// JSON: {"schema": "alo-system/1", "variables": [...], "objective": [...],
// "rows": [{"tag", "index", "rhs", "terms": [[var, coef], ...]}]}.

#include <stdexcept>
#include <string>
#include <string_view>

#include "alo/model.h"

namespace alo {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws std::invalid_argument for a system with no columns.
std::string WriteMps(const ConstraintSystem& system,
                     std::string_view name = "ALO");
ConstraintSystem ReadMps(std::string_view text);

std::string WriteSystemJson(const ConstraintSystem& system);
ConstraintSystem ReadSystemJson(std::string_view text);

// "%.12g" rendering used by the MPS writer.
std::string FormatMpsNumber(const Rational& value);

}  // namespace alo

#endif  // ALO_SYSTEM_IO_H_
