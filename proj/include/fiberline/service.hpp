#pragma once

#include "fiberline/bvh.hpp"
#include "fiberline/field.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace fiberline {

/// A loaded mesh with its cached hierarchies. Immutable once published,
/// except that cell trees for new leaf sizes are added lazily under a lock.
class Dataset {
  public:
    Dataset(std::string id, BivariateField field);

    const std::string& id() const { return id_; }
    const BivariateField& field() const { return field_; }
    const Bvh& domain_cells() const { return domain_cells_; }

    /// Cell tree with the given leaf size, built on first use.
    const Bvh& cells(std::size_t leaf_size) const;

  private:
    std::string id_;
    BivariateField field_;
    Bvh domain_cells_;
    mutable std::mutex mutex_;
    mutable std::map<std::size_t, std::unique_ptr<Bvh>> cells_;
};

struct HttpReply {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

/// Endpoint logic, independent of the HTTP transport.
class Service {
  public:
    /// Loads every `*.bvf2` and `*.grid` file in `data_dir`; the id is the file
    /// stem. Throws IoError if the directory cannot be read.
    static Service from_directory(const std::filesystem::path& data_dir);

    explicit Service(std::vector<std::shared_ptr<const Dataset>> datasets);

    std::size_t dataset_count() const { return datasets_.size(); }
    const Dataset* find(std::string_view id) const;

    HttpReply list_datasets() const;
    HttpReply density(std::string_view id, std::string_view res) const;
    HttpReply extract(std::string_view id, std::string_view body) const;
    HttpReply isoline(std::string_view id, std::string_view body) const;

  private:
    std::map<std::string, std::shared_ptr<const Dataset>, std::less<>> datasets_;
};

/// Grayscale codomain occupancy: each pixel counts the cell-image boxes that
/// touch it, scaled so the maximum count maps to 255. Row 0 is the top (max v).
std::vector<std::uint8_t> density_raster(const BivariateField& field, std::size_t res);

/// HTTP/1.1 front end for a Service.
class HttpServer {
  public:
    explicit HttpServer(std::shared_ptr<const Service> service);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds `host:port` (0 picks a free port). Returns the bound port, or -1.
    int bind(const std::string& host, int port);
    /// Serves until stop(). Requires a successful bind().
    bool run();
    void stop();
    void wait_until_ready() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace fiberline
