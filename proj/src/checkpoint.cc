/* Copyright 2026 The lstmocr Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "lstmocr/checkpoint.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>

#include "lstmocr/errors.h"
#include "lstmocr/random.h"

namespace lstmocr {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'L', 'S', 'T', 'M', 'O', 'C', 'R', '\0'};

std::uint64_t Fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <typename T>
void Put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string_view b) : b_(b) {}

  template <typename T>
  T Get() {
    Need(sizeof(T));
    T v;
    std::memcpy(&v, b_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string_view Bytes(std::size_t n) {
    Need(n);
    auto s = b_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }

 private:
  void Need(std::size_t n) const {
    if (b_.size() - pos_ < n) throw DataError("checkpoint truncated");
  }
  std::string_view b_;
  std::size_t pos_ = 0;
};

json DoubleToJson(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double DoubleFromJson(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw DataError("bad number in checkpoint: " + s);
  }
  return j.get<double>();
}

json LogToJson(const EpochLog& log) {
  return {{"epoch", log.epoch},
          {"train", ToJson(log.train)},
          {"test", ToJson(log.test)},
          {"wall_seconds", log.wall_seconds}};
}

EpochLog LogFromJson(const json& j) {
  EpochLog log;
  log.epoch = j.at("epoch").get<int>();
  log.train = EvalReportFromJson(j.at("train"));
  log.test = EvalReportFromJson(j.at("test"));
  log.wall_seconds = j.at("wall_seconds").get<double>();
  return log;
}

}  // namespace

json ToJson(const EvalReport& r) {
  return {{"dataset", r.dataset_name},
          {"n_sequences", r.n_sequences},
          {"ctc_error", r.ctc_error},
          {"label_error", r.label_error},
          {"seq_error", r.seq_error},
          {"insertions", r.insertions},
          {"deletions", r.deletions},
          {"substitutions", r.substitutions}};
}

EvalReport EvalReportFromJson(const json& j) {
  EvalReport r;
  r.dataset_name = j.at("dataset").get<std::string>();
  r.n_sequences = j.at("n_sequences").get<int>();
  r.ctc_error = j.at("ctc_error").get<double>();
  r.label_error = j.at("label_error").get<double>();
  r.seq_error = j.at("seq_error").get<double>();
  r.insertions = j.at("insertions").get<std::int64_t>();
  r.deletions = j.at("deletions").get<std::int64_t>();
  r.substitutions = j.at("substitutions").get<std::int64_t>();
  return r;
}

std::string SerializeCheckpoint(const Checkpoint& ckpt) {
  const auto& dims = ckpt.params.dims();
  json header;
  header["format"] = "lstmocr-checkpoint";
  header["dims"] = {{"input_size", dims.input_size},
                    {"hidden_size", dims.hidden_size},
                    {"num_classes", dims.num_classes}};
  header["alphabet"] = ckpt.alphabet.ToUtf8();
  header["seed"] = ckpt.seed;
  header["rng"] = kRngAlgorithm;
  header["config"] = ckpt.config;

  std::vector<std::pair<std::string, const NetworkParams*>> arrays = {
      {"params", &ckpt.params}};
  if (ckpt.training) {
    const auto& t = *ckpt.training;
    json tr;
    tr["epochs_completed"] = t.epochs_completed;
    tr["stopped_early"] = t.stopped_early;
    tr["stopper"] = {{"patience", t.stopper.patience()},
                     {"best", DoubleToJson(t.stopper.best())},
                     {"last_improvement", t.stopper.last_improvement()}};
    auto tracked = [](const TrackedModel& m) {
      return json{{"epoch", m.epoch}, {"test", ToJson(m.test)}};
    };
    tr["best_by_ctc"] = tracked(t.tracker.best_by_ctc());
    tr["best_by_label"] = tracked(t.tracker.best_by_label());
    tr["logs"] = json::array();
    for (const auto& log : t.logs) tr["logs"].push_back(LogToJson(log));
    header["training"] = tr;
    arrays.emplace_back("velocity", &t.velocity);
    if (t.tracker.best_by_ctc().epoch > 0) {
      arrays.emplace_back("best_by_ctc", &t.tracker.best_by_ctc().params);
    }
    if (t.tracker.best_by_label().epoch > 0) {
      arrays.emplace_back("best_by_label", &t.tracker.best_by_label().params);
    }
  }
  header["arrays"] = json::array();
  for (const auto& [name, p] : arrays) {
    if (p->dims() != dims) throw DataError("checkpoint array " + name + " has mismatched dims");
    header["arrays"].push_back({{"name", name}, {"length", p->values().size()}});
  }

  const std::string header_text = header.dump();
  std::string out(kMagic, sizeof(kMagic));
  Put<std::uint32_t>(out, kCheckpointVersion);
  Put<std::uint64_t>(out, header_text.size());
  out += header_text;
  for (const auto& [name, p] : arrays) {
    const auto v = p->values();
    out.append(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(double));
  }
  Put<std::uint64_t>(out, Fnv1a(out));
  return out;
}

Checkpoint DeserializeCheckpoint(std::string_view bytes) {
  if (bytes.size() < sizeof(kMagic) + 12 + 8) throw DataError("checkpoint truncated");
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw DataError("not a checkpoint file (bad magic)");
  }
  const auto body = bytes.substr(0, bytes.size() - 8);
  std::uint64_t stored;
  std::memcpy(&stored, bytes.data() + body.size(), 8);

  Reader r(body);
  r.Bytes(sizeof(kMagic));
  const auto version = r.Get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw DataError("unsupported checkpoint version " + std::to_string(version) +
                    " (expected " + std::to_string(kCheckpointVersion) + ")");
  }
  if (stored != Fnv1a(body)) throw DataError("checkpoint checksum mismatch (corrupt or truncated)");
  const auto header_len = r.Get<std::uint64_t>();

  try {
    const json header = json::parse(r.Bytes(header_len));
    Checkpoint ckpt;
    NetworkDims dims;
    dims.input_size = header.at("dims").at("input_size").get<int>();
    dims.hidden_size = header.at("dims").at("hidden_size").get<int>();
    dims.num_classes = header.at("dims").at("num_classes").get<int>();
    ckpt.alphabet = Alphabet::FromUtf8(header.at("alphabet").get<std::string>());
    if (ckpt.alphabet.num_classes() != dims.num_classes) {
      throw DataError("checkpoint alphabet does not match output size");
    }
    ckpt.seed = header.at("seed").get<std::uint64_t>();
    ckpt.config = header.at("config");

    std::map<std::string, NetworkParams> arrays;
    for (const auto& a : header.at("arrays")) {
      NetworkParams p(dims);
      const auto len = a.at("length").get<std::size_t>();
      if (len != p.values().size()) throw DataError("checkpoint array length mismatch");
      const auto raw = r.Bytes(len * sizeof(double));
      std::memcpy(p.values().data(), raw.data(), raw.size());
      arrays.emplace(a.at("name").get<std::string>(), std::move(p));
    }
    if (r.pos() != body.size()) throw DataError("checkpoint has trailing bytes");
    if (!arrays.count("params")) throw DataError("checkpoint has no parameters");
    ckpt.params = arrays.at("params");

    if (header.contains("training")) {
      const json& tr = header.at("training");
      TrainerState st;
      st.epochs_completed = tr.at("epochs_completed").get<int>();
      st.stopped_early = tr.at("stopped_early").get<bool>();
      st.params = ckpt.params;
      if (!arrays.count("velocity")) throw DataError("checkpoint missing velocity");
      st.velocity = arrays.at("velocity");
      st.stopper = EarlyStopper(tr.at("stopper").at("patience").get<int>());
      st.stopper.Restore(DoubleFromJson(tr.at("stopper").at("best")),
                         tr.at("stopper").at("last_improvement").get<int>());
      auto restore = [&](const char* key, TrackedModel& m) {
        m.epoch = tr.at(key).at("epoch").get<int>();
        m.test = EvalReportFromJson(tr.at(key).at("test"));
        if (m.epoch > 0) {
          if (!arrays.count(key)) throw DataError(std::string("checkpoint missing ") + key);
          m.params = arrays.at(key);
        }
      };
      restore("best_by_ctc", st.tracker.mutable_best_by_ctc());
      restore("best_by_label", st.tracker.mutable_best_by_label());
      for (const auto& log : tr.at("logs")) st.logs.push_back(LogFromJson(log));
      ckpt.training = std::move(st);
    }
    return ckpt;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed checkpoint header: ") + e.what());
  }
}

void WriteFileAtomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw DataError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void SaveCheckpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  WriteFileAtomic(path, SerializeCheckpoint(ckpt));
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  const std::string bytes{std::istreambuf_iterator<char>(in),
                          std::istreambuf_iterator<char>()};
  return DeserializeCheckpoint(bytes);
}

}  // namespace lstmocr
