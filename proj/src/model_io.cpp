/*
 * Copyright 2026 The morphfit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "morphfit/model_io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "morphfit/error.hpp"

namespace morphfit {

namespace {

template <typename T>
void put(std::ostream& out, const T* data, std::size_t count) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(sizeof(T) * count));
}

class Payload {
 public:
  Payload(const std::string& data, std::size_t pos) : data_(data), pos_(pos) {}

  template <typename T>
  void get(T* dst, std::size_t count) {
    const std::size_t bytes = sizeof(T) * count;
    if (pos_ + bytes > data_.size()) throw FormatError("model payload is truncated", pos_);
    std::memcpy(dst, data_.data() + pos_, bytes);
    pos_ += bytes;
  }

 private:
  const std::string& data_;
  std::size_t pos_;
};

}  // namespace

void save_model(const LowRankGP& model, const std::filesystem::path& path, const std::string& description) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  std::string desc = description;
  for (char& c : desc)
    if (c == '\n') c = ' ';
  const TriangleMesh& ref = model.reference();
  out << kModelFormatTag << '\n'
      << "vertices " << ref.vertex_count() << '\n'
      << "faces " << ref.face_count() << '\n'
      << "rank " << model.rank() << '\n'
      << "description " << desc << '\n'
      << "end_header\n";
  const Eigen::VectorXd v = ref.flattened();
  put(out, v.data(), static_cast<std::size_t>(v.size()));
  for (const Face& f : ref.faces()) put(out, f.data(), 3);
  put(out, model.mean().data(), static_cast<std::size_t>(model.mean().size()));
  put(out, model.eigenvalues().data(), static_cast<std::size_t>(model.eigenvalues().size()));
  put(out, model.basis().data(), static_cast<std::size_t>(model.basis().size()));
  if (!out) throw IoError("failed writing " + path.string());
}

LowRankGP load_model(const std::filesystem::path& path, std::string* description) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string data = ss.str();

  std::size_t pos = 0;
  auto line = [&]() {
    const std::size_t start = pos;
    const std::size_t end = data.find('\n', pos);
    if (end == std::string::npos) throw FormatError("model header is truncated", start);
    pos = end + 1;
    return data.substr(start, end - start);
  };
  if (line() != kModelFormatTag) throw FormatError("not a " + std::string(kModelFormatTag) + " file", 0);

  long long nv = -1, nf = -1, rank = -1;
  std::string desc;
  for (;;) {
    const std::size_t at = pos;
    const std::string l = line();
    if (l == "end_header") break;
    std::istringstream ls(l);
    std::string key;
    ls >> key;
    if (key == "vertices") {
      ls >> nv;
    } else if (key == "faces") {
      ls >> nf;
    } else if (key == "rank") {
      ls >> rank;
    } else if (key == "description") {
      desc = l.size() > 12 ? l.substr(12) : std::string();
    } else {
      throw FormatError("unknown model header field '" + key + "'", at);
    }
  }
  if (nv < 0 || nf < 0 || rank < 1) throw FormatError("model header lacks sizes", pos);

  Payload payload(data, pos);
  Eigen::VectorXd v(3 * nv);
  payload.get(v.data(), static_cast<std::size_t>(v.size()));
  std::vector<Face> faces(static_cast<std::size_t>(nf));
  for (Face& f : faces) payload.get(f.data(), 3);
  std::vector<Vec3> verts(static_cast<std::size_t>(nv));
  for (long long i = 0; i < nv; ++i) verts[i] = v.segment<3>(3 * i);

  Eigen::VectorXd mean(3 * nv), lambda(rank);
  Eigen::MatrixXd basis(3 * nv, rank);
  payload.get(mean.data(), static_cast<std::size_t>(mean.size()));
  payload.get(lambda.data(), static_cast<std::size_t>(lambda.size()));
  payload.get(basis.data(), static_cast<std::size_t>(basis.size()));
  if (description) *description = desc;
  return LowRankGP(TriangleMesh(std::move(verts), std::move(faces)), std::move(mean), std::move(lambda),
                   std::move(basis));
}

}  // namespace morphfit
