#include "ksym/model.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>
#include <utility>
#include <vector>

#include "ksym/errors.hpp"

namespace ksym {

const Sopde& ModelFile::need_sopde() const {
  if (!sopde) throw ModelError("model has no SOPDE section (no xi[A][i][B] keys)");
  return *sopde;
}

const Connection& ModelFile::need_connection() const {
  if (!connection) throw ModelError("model has no connection section (no N[j][A][i] keys)");
  return *connection;
}

const Lagrangian& ModelFile::need_lagrangian() const {
  if (!lagrangian) throw ModelError("model has no lagrangian");
  return *lagrangian;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace((unsigned char)s[b])) ++b;
  while (e > b && std::isspace((unsigned char)s[e - 1])) --e;
  return s.substr(b, e - b);
}

bool is_ident_start(char c) { return std::isalpha((unsigned char)c) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum((unsigned char)c) || c == '_'; }

/// Replaces whole-word occurrences of constant names, skipping over numeric
/// literals so an exponent like the e in 2e-3 is never mistaken for a name.
std::string substitute(const std::string& text,
                       const std::vector<std::pair<std::string, std::string>>& constants) {
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char c = text[pos];
    if (std::isdigit((unsigned char)c) ||
        (c == '.' && pos + 1 < text.size() && std::isdigit((unsigned char)text[pos + 1]))) {
      while (pos < text.size() &&
             (std::isdigit((unsigned char)text[pos]) || text[pos] == '.'))
        out += text[pos++];
      if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
        std::size_t p = pos + 1;
        if (p < text.size() && (text[p] == '+' || text[p] == '-')) ++p;
        if (p < text.size() && std::isdigit((unsigned char)text[p])) {
          while (pos < p) out += text[pos++];
          while (pos < text.size() && std::isdigit((unsigned char)text[pos]))
            out += text[pos++];
        }
      }
    } else if (is_ident_start(c)) {
      std::size_t start = pos;
      while (pos < text.size() && is_ident_char(text[pos])) ++pos;
      const std::string word = text.substr(start, pos - start);
      bool replaced = false;
      for (const auto& [name, value] : constants)
        if (name == word) {
          out += '(' + value + ')';
          replaced = true;
          break;
        }
      if (!replaced) out += word;
    } else {
      out += c;
      ++pos;
    }
  }
  return out;
}

struct LineParser {
  int line_no = 0;

  [[noreturn]] void fail(const std::string& msg) const { throw ModelError(
      "line " + std::to_string(line_no) + ": " + msg, line_no); }

  int parse_int(const std::string& text, int lo, int hi, const char* what) const {
    int v = 0;
    const std::string t = trim(text);
    auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
      fail(std::string(what) + " must be an integer, got \"" + t + "\"");
    if (v < lo || v > hi)
      fail(std::string(what) + " = " + std::to_string(v) + " outside " +
           std::to_string(lo) + ".." + std::to_string(hi));
    return v;
  }

  /// Parses "name[a][b][c]" into indices; returns false if key is not `name[...`.
  bool bracketed(const std::string& key, const std::string& name, int out[3]) const {
    if (key.size() <= name.size() || key.compare(0, name.size(), name) != 0 ||
        key[name.size()] != '[')
      return false;
    std::size_t pos = name.size();
    for (int slot = 0; slot < 3; ++slot) {
      if (pos >= key.size() || key[pos] != '[') fail("expected three [index] groups in " + key);
      const std::size_t close = key.find(']', pos);
      if (close == std::string::npos) fail("missing ] in " + key);
      out[slot] = parse_int(key.substr(pos + 1, close - pos - 1), 1, 1 << 20, "index");
      pos = close + 1;
    }
    if (pos != key.size()) fail("unexpected text after indices in " + key);
    return true;
  }
};

}  // namespace

ModelFile parse_model(std::istream& in) {
  ModelFile model;
  std::vector<std::pair<std::string, std::string>> constants;
  bool have_n = false, have_k = false;
  int n = 0, k = 0;
  LineParser lp;

  auto dims_ready = [&]() -> Dims {
    if (!have_n || !have_k) lp.fail("n and k must be set before this key");
    return Dims(n, k);
  };

  std::string raw;
  while (std::getline(in, raw)) {
    ++lp.line_no;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) lp.fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) lp.fail("empty key");
    if (value.empty()) lp.fail("empty value for " + key);

    try {
      if (key == "n") {
        if (have_n) lp.fail("n already set");
        n = lp.parse_int(value, 1, 64, "n");
        have_n = true;
      } else if (key == "k") {
        if (have_k) lp.fail("k already set");
        k = lp.parse_int(value, 1, 64, "k");
        have_k = true;
      } else if (key.rfind("const ", 0) == 0 || key.rfind("const\t", 0) == 0) {
        const std::string name = trim(key.substr(6));
        if (name.empty() || !is_ident_start(name[0])) lp.fail("bad constant name \"" + name + "\"");
        for (char c : name)
          if (!is_ident_char(c)) lp.fail("bad constant name \"" + name + "\"");
        if (name == "sin" || name == "cos" || name == "exp")
          lp.fail("constant name " + name + " collides with a function");
        for (const auto& [existing, unused] : constants)
          if (existing == name) lp.fail("constant " + name + " already defined");
        constants.emplace_back(name, substitute(value, constants));
      } else if (key == "lagrangian") {
        const Dims dims = dims_ready();
        if (model.lagrangian) lp.fail("lagrangian already set");
        model.lagrangian.emplace(dims, parse(substitute(value, constants), dims));
      } else {
        int ix[3];
        if (lp.bracketed(key, "xi", ix)) {
          const Dims dims = dims_ready();
          const int A = ix[0], i = ix[1], B = ix[2];
          if (A < 1 || A > k) lp.fail("first xi index " + std::to_string(A) + " outside 1..k");
          if (i < 1 || i > n) lp.fail("second xi index " + std::to_string(i) + " outside 1..n");
          if (B < 1 || B > k) lp.fail("third xi index " + std::to_string(B) + " outside 1..k");
          if (!model.sopde) model.sopde.emplace(dims);
          model.sopde->at(A, i, B) = parse(substitute(value, constants), dims);
        } else if (lp.bracketed(key, "N", ix)) {
          const Dims dims = dims_ready();
          const int j = ix[0], A = ix[1], i = ix[2];
          if (j < 1 || j > n) lp.fail("first N index " + std::to_string(j) + " outside 1..n");
          if (A < 1 || A > k) lp.fail("second N index " + std::to_string(A) + " outside 1..k");
          if (i < 1 || i > n) lp.fail("third N index " + std::to_string(i) + " outside 1..n");
          if (!model.connection) model.connection.emplace(dims);
          model.connection->at(j, A, i) = parse(substitute(value, constants), dims);
        } else {
          lp.fail("unknown key \"" + key + "\"");
        }
      }
    } catch (const ModelError&) {
      throw;
    } catch (const Error& e) {
      lp.fail(e.what());
    }
  }

  if (!have_n || !have_k) throw ModelError("model must set n and k");
  model.dims = Dims(n, k);
  return model;
}

ModelFile parse_model_text(const std::string& text) {
  std::istringstream in(text);
  return parse_model(in);
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file " + path);
  return parse_model(in);
}

}  // namespace ksym
