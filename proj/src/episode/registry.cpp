// SPDX-License-Identifier: Apache-2.0
#include <fmt/format.h>

#include "drawspace/episode.hpp"
#include "drawspace/error.hpp"

namespace drawspace::episode {

ImageRegistry::ImageRegistry(std::vector<canvas::RasterImage> inputs)
    : images_(std::move(inputs)), inputs_(static_cast<int>(images_.size())) {
    provenance_.reserve(images_.size());
    for (int n = 1; n <= inputs_; ++n) {
        provenance_.push_back({Provenance::Source::Input, n, 0, 0});
    }
    png_cache_.resize(images_.size());
}

const canvas::RasterImage& ImageRegistry::at(int index) const {
    if (!contains(index)) {
        throw std::out_of_range(fmt::format("image index {} not in registry of {}", index, size()));
    }
    return images_[static_cast<std::size_t>(index - 1)];
}

const Provenance& ImageRegistry::provenance(int index) const {
    if (!contains(index)) {
        throw std::out_of_range(fmt::format("image index {} not in registry of {}", index, size()));
    }
    return provenance_[static_cast<std::size_t>(index - 1)];
}

const std::vector<std::uint8_t>& ImageRegistry::png(int index) const {
    const auto& image = at(index);
    auto& slot = png_cache_[static_cast<std::size_t>(index - 1)];
    if (slot.empty()) slot = canvas::encode_png(image);
    return slot;
}

int ImageRegistry::append(canvas::RasterImage image, int step, int op) {
    images_.push_back(std::move(image));
    provenance_.push_back({Provenance::Source::Operation, 0, step, op});
    png_cache_.emplace_back();
    return size();
}

}  // namespace drawspace::episode
