#pragma once

#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace cylvar {

using Vec = std::vector<double>;

/// Deterministic key-sorted "key = value" block.
class ReportText {
public:
  void set(const std::string& key, const std::string& value) { entries_[key] = value; }
  void set(const std::string& key, double value) {
    std::ostringstream os;
    os.precision(17);
    os << value;
    entries_[key] = os.str();
  }
  void set(const std::string& key, const char* value) { entries_[key] = value; }
  void set(const std::string& key, int value) { entries_[key] = std::to_string(value); }
  void set(const std::string& key, std::size_t value) { entries_[key] = std::to_string(value); }
  void set(const std::string& key, bool value) { entries_[key] = value ? "true" : "false"; }
  void set(const std::string& key, const Vec& v) {
    std::ostringstream os;
    os.precision(17);
    os << '[';
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
    os << ']';
    entries_[key] = os.str();
  }
  std::string str() const {
    std::string out;
    for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
    return out;
  }

private:
  std::map<std::string, std::string> entries_;
};

}  // namespace cylvar
