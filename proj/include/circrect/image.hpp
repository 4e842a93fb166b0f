#pragma once

#include <cassert>
#include <cstdint>
#include <vector>

namespace circrect {

// Row-major single-channel image plane.
template <typename T> class Plane {
public:
  using value_type = T;

  Plane() = default;
  Plane(int width, int height, T fill = T{})
      : m_width{width}, m_height{height},
        m_data(static_cast<size_t>(width) * static_cast<size_t>(height), fill) {}

  [[nodiscard]] auto width() const noexcept { return m_width; }
  [[nodiscard]] auto height() const noexcept { return m_height; }
  [[nodiscard]] auto size() const noexcept { return m_data.size(); }
  [[nodiscard]] auto empty() const noexcept { return m_data.empty(); }

  [[nodiscard]] auto operator()(int row, int col) -> T & {
    assert(row >= 0 && row < m_height && col >= 0 && col < m_width);
    return m_data[static_cast<size_t>(row) * static_cast<size_t>(m_width) +
                  static_cast<size_t>(col)];
  }
  [[nodiscard]] auto operator()(int row, int col) const -> const T & {
    assert(row >= 0 && row < m_height && col >= 0 && col < m_width);
    return m_data[static_cast<size_t>(row) * static_cast<size_t>(m_width) +
                  static_cast<size_t>(col)];
  }

  [[nodiscard]] auto data() noexcept -> std::vector<T> & { return m_data; }
  [[nodiscard]] auto data() const noexcept -> const std::vector<T> & { return m_data; }

  friend auto operator==(const Plane &, const Plane &) -> bool = default;

private:
  int m_width{};
  int m_height{};
  std::vector<T> m_data;
};

using Plane8 = Plane<std::uint8_t>;
using Plane16 = Plane<std::uint16_t>;

} // namespace circrect
