#pragma once

#include "crowdgen/error.hpp"
#include "crowdgen/image_ops.hpp"

namespace crowdgen::detail {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

inline void require_valid(const ImageBuffer& img) {
  if (img.width <= 0 || img.height <= 0 ||
      img.pixels.size() != static_cast<std::size_t>(img.width) * img.height * 4)
    fail(ErrorKind::kValidation, "image buffer has inconsistent dimensions");
}

inline void require_fits(const ImageBuffer& img, const ImageBuffer& asset) {
  if (asset.width > img.width || asset.height > img.height)
    fail(ErrorKind::kValidation, "overlay asset (" + std::to_string(asset.width) + "x" +
                                     std::to_string(asset.height) + ") is larger than the image (" +
                                     std::to_string(img.width) + "x" + std::to_string(img.height) + ")");
}

}  // namespace crowdgen::detail
