#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lqgcodec {

// Deterministic JSON emitter: every double is printed with 17 significant
// digits (round-trip exact), keys keep insertion order, no locale surprises.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& key(const std::string& k);
  JsonWriter& value(double x);
  JsonWriter& value(bool b);
  JsonWriter& value(std::int64_t n);
  JsonWriter& value(std::uint64_t n);
  JsonWriter& value(const std::string& s);
  JsonWriter& value(const Eigen::MatrixXd& m);  // array of row arrays
  JsonWriter& begin_array();
  JsonWriter& end_array();

  // Convenience: key + scalar value.
  template <typename T>
  JsonWriter& field(const std::string& k, const T& v) {
    key(k);
    return value(v);
  }

  std::string str() const { return out_; }

  static std::string format_double(double x);  // %.17g with nan/inf guard

 private:
  void separator();
  std::string out_;
  std::vector<bool> first_in_scope_ = {true};
  bool pending_key_ = false;
};

void write_text_file(const std::string& path, const std::string& content);

}  // namespace lqgcodec
