#include <openssl/evp.h>

#include <fstream>
#include <random>
#include <sstream>

#include "crowdgen/error.hpp"
#include "crowdgen/service.hpp"
#include "files.hpp"

namespace crowdgen {

namespace fs = std::filesystem;

namespace detail {

void write_atomic(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  thread_local std::mt19937_64 tmp_names(std::random_device{}());
  const fs::path tmp = path.string() + ".tmp" + std::to_string(tmp_names());
  {
    std::ofstream out(tmp, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot move " + tmp.string() + " into place: " + ec.message());
}

void write_atomic(const fs::path& path, const std::string& text) {
  write_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace detail

using detail::read_bytes;
using detail::write_atomic;

namespace {

bool is_handle(const std::string& h) {
  return h.size() == 64 &&
         h.find_first_not_of("0123456789abcdef") == std::string::npos;
}

}  // namespace

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorKind::kIo, "sha256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

ImageStore::ImageStore(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create image store " + dir_.string());
}

fs::path ImageStore::path_for(const std::string& handle) const { return dir_ / (handle + ".png"); }

std::string ImageStore::put_png(std::span<const std::uint8_t> png) {
  decode_png(png);  // reject anything that is not a readable PNG
  std::string handle = sha256_hex(png);
  if (!fs::exists(path_for(handle))) write_atomic(path_for(handle), png);
  return handle;
}

std::string ImageStore::put(const ImageBuffer& img) {
  const auto png = encode_png(img);
  std::string handle = sha256_hex(png);
  if (!fs::exists(path_for(handle))) write_atomic(path_for(handle), png);
  return handle;
}

bool ImageStore::contains(const std::string& handle) const {
  return is_handle(handle) && fs::exists(path_for(handle));
}

std::vector<std::uint8_t> ImageStore::get_png(const std::string& handle) const {
  if (!contains(handle)) throw Error(ErrorKind::kNotFound, "unknown image handle", {handle});
  return read_bytes(path_for(handle));
}

ImageBuffer ImageStore::get(const std::string& handle) const { return decode_png(get_png(handle)); }

LibraryStore::LibraryStore(const fs::path& source, fs::path persisted) : persisted_(std::move(persisted)) {
  current_ = std::make_shared<const PreferenceLibrary>(
      load_library_file(fs::exists(persisted_) ? persisted_ : source));
}

std::shared_ptr<const PreferenceLibrary> LibraryStore::snapshot() const {
  std::lock_guard lock(read_mu_);
  return current_;
}

void LibraryStore::append(const std::string& task, Aspect aspect, PreferenceResponse response) {
  std::lock_guard writer(write_mu_);
  auto next = std::make_shared<PreferenceLibrary>(*snapshot());
  append_response(*next, task, aspect, std::move(response));
  write_atomic(persisted_, to_json(*next).dump(2) + "\n");
  std::lock_guard lock(read_mu_);
  current_ = std::move(next);
}

RecordStore::RecordStore(fs::path file) : file_(std::move(file)) {
  if (fs::exists(file_)) {
    std::ifstream in(file_);
    records_ = read_records_jsonl(in);
  }
}

void RecordStore::append(const ComparisonRecord& r) {
  std::unique_lock lock(mu_);
  std::error_code ec;
  fs::create_directories(file_.parent_path(), ec);
  std::ofstream out(file_, std::ios::app);
  out << to_json(r).dump() << '\n';
  out.flush();
  if (!out) throw Error(ErrorKind::kIo, "cannot append to " + file_.string());
  records_.push_back(r);
}

std::vector<ComparisonRecord> RecordStore::snapshot() const {
  std::shared_lock lock(mu_);
  return records_;
}

}  // namespace crowdgen
