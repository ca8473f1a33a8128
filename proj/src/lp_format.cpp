#include "gridramp/lp_format.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>
#include <vector>

namespace gridramp {

namespace {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// LP names may not contain brackets or start with a digit, 'e', or '.'.
std::string sanitize(const std::string& tag, const char* fallback_prefix, int id) {
  std::string name;
  for (char c : tag) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
        c == '(' || c == ')') {
      name.push_back(c);
    } else if (c == '[') {
      name.push_back('(');
    } else if (c == ']') {
      name.push_back(')');
    } else {
      name.push_back('_');
    }
  }
  if (name.empty() || std::isdigit(static_cast<unsigned char>(name[0])) ||
      name[0] == '.' || name[0] == 'e' || name[0] == 'E') {
    name = std::string(fallback_prefix) + std::to_string(id);
  }
  return name;
}

class LineWriter {
 public:
  explicit LineWriter(std::ostream& os) : os_(os) {}

  void begin(const std::string& head) {
    os_ << head;
    width_ = head.size();
  }

  void append(const std::string& piece) {
    if (width_ + piece.size() + 1 > 78) {
      os_ << "\n     ";
      width_ = 5;
    }
    os_ << ' ' << piece;
    width_ += piece.size() + 1;
  }

  void end() { os_ << '\n'; }

 private:
  std::ostream& os_;
  std::size_t width_ = 0;
};

void write_terms(LineWriter& line, const std::vector<std::pair<int, double>>& coeffs,
                 const std::vector<std::string>& names, bool& any) {
  for (const auto& [var, value] : coeffs) {
    if (value == 0.0) continue;
    double mag = std::fabs(value);
    std::string term;
    if (!any && value < 0) {
      term = "-";
    } else if (any) {
      term = value < 0 ? "-" : "+";
    }
    if (!term.empty()) {
      line.append(term);
    }
    if (mag != 1.0) line.append(format_number(mag));
    line.append(names[static_cast<std::size_t>(var)]);
    any = true;
  }
}

} // namespace

std::string write_lp_format(const MILPModel& model) {
  std::ostringstream os;
  const int n = model.num_variables();

  std::vector<std::string> names(static_cast<std::size_t>(n));
  std::unordered_set<std::string> used;
  for (int j = 0; j < n; ++j) {
    std::string name = sanitize(model.variable(j).tag, "x", j);
    if (!used.insert(name).second) {
      name = "x" + std::to_string(j);
      used.insert(name);
    }
    names[static_cast<std::size_t>(j)] = name;
  }

  const Objective& obj = model.objective();
  os << (obj.sense == ObjSense::maximize ? "Maximize" : "Minimize") << '\n';
  {
    LineWriter line(os);
    line.begin(" obj:");
    bool any = false;
    write_terms(line, obj.coeffs, names, any);
    if (obj.constant != 0.0 || !any) {
      if (any) {
        line.append(obj.constant < 0 ? "-" : "+");
        line.append(format_number(std::fabs(obj.constant)));
      } else {
        line.append(format_number(obj.constant));
      }
    }
    line.end();
  }

  os << "Subject To\n";
  std::unordered_set<std::string> row_used;
  for (int i = 0; i < model.num_constraints(); ++i) {
    const Constraint& row = model.constraint(i);
    std::string rname = sanitize(row.tag, "c", i);
    if (!row_used.insert(rname).second) {
      rname = "c" + std::to_string(i);
      row_used.insert(rname);
    }
    LineWriter line(os);
    line.begin(" " + rname + ":");
    bool any = false;
    write_terms(line, row.coeffs, names, any);
    if (!any) {
      line.append("0");
      if (n > 0) line.append(names[0]);
    }
    switch (row.sense) {
      case RowSense::le: line.append("<="); break;
      case RowSense::ge: line.append(">="); break;
      case RowSense::eq: line.append("="); break;
    }
    line.append(format_number(row.rhs));
    line.end();
  }

  os << "Bounds\n";
  for (int j = 0; j < n; ++j) {
    const Variable& var = model.variable(j);
    const std::string& name = names[static_cast<std::size_t>(j)];
    if (var.kind == VarKind::binary) {
      // Only worth a line when tighter than the implied [0, 1].
      if (var.lower == var.upper) {
        os << ' ' << name << " = " << format_number(var.lower) << '\n';
      }
      continue;
    }
    if (var.lower == var.upper) {
      os << ' ' << name << " = " << format_number(var.lower) << '\n';
    } else if (var.lower <= -kInfinity && var.upper >= kInfinity) {
      os << ' ' << name << " free\n";
    } else if (var.lower <= -kInfinity) {
      os << " -inf <= " << name << " <= " << format_number(var.upper) << '\n';
    } else if (var.upper >= kInfinity) {
      if (var.lower != 0.0) {
        os << ' ' << name << " >= " << format_number(var.lower) << '\n';
      }
    } else {
      os << ' ' << format_number(var.lower) << " <= " << name << " <= "
         << format_number(var.upper) << '\n';
    }
  }

  bool any_binary = false;
  for (int j = 0; j < n; ++j) {
    if (model.variable(j).kind == VarKind::binary) { any_binary = true; break; }
  }
  if (any_binary) {
    os << "Binary\n";
    LineWriter line(os);
    line.begin("");
    for (int j = 0; j < n; ++j) {
      if (model.variable(j).kind == VarKind::binary) {
        line.append(names[static_cast<std::size_t>(j)]);
      }
    }
    line.end();
  }

  os << "End\n";
  return os.str();
}

void write_lp_file(const MILPModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << write_lp_format(model);
}

} // namespace gridramp
