#pragma once

#include <string>
#include <string_view>

namespace qoqa {

/// Classic Porter stemming algorithm, following the reference implementation
/// used by Lucene (including its two step-2 rule adjustments, bli->ble and
/// logi->log, and the rule that words of length <= 2 are left untouched).
/// Input is expected to be lowercase; output is the stemmed form.
std::string porter_stem(std::string_view word);

}  // namespace qoqa
