#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <future>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "farsec/orchestrator.hpp"

namespace farsec {

/// Controller state loaded from a directory holding resources.csv and,
/// optionally, requests.csv, sla.csv and hosts.csv. Files named
/// `<stem>.resources.csv` etc. (as written by the generator) are accepted
/// when the directory holds exactly one such set. Requests are admitted in
/// file order.
DataplaneState load_state(const std::filesystem::path& dir, const OrchestratorOptions& options = {});

struct FlowDecision {
  std::string flow_id;
  bool admitted = false;
  std::vector<NodeId> path;
  SecurityLevel requirement = 0;
  std::uint64_t version = 0;
};

/// Bounded queue of deltas for one stream client.
class Subscription {
 public:
  explicit Subscription(std::size_t capacity) : capacity_(capacity) {}

  /// Waits up to `timeout` for the next delta. nullopt on timeout or once
  /// closed and drained.
  std::optional<nlohmann::json> next(std::chrono::milliseconds timeout);
  [[nodiscard]] bool closed() const;
  void close();
  /// Snapshot current when the subscription was opened; deltas start right
  /// after its version.
  [[nodiscard]] const std::shared_ptr<const nlohmann::json>& base() const noexcept { return base_; }

 private:
  friend class Service;
  std::shared_ptr<const nlohmann::json> base_;
  /// False when the queue is full; the subscriber is then closed.
  bool offer(const nlohmann::json& delta);

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<nlohmann::json> queue_;
  std::size_t capacity_;
  bool closed_ = false;
};

/// Serialises API mutations onto one worker thread. Every accepted mutation
/// gets the next version number at submission and produces exactly one
/// delta, published to subscribers in version order.
class Service {
 public:
  explicit Service(DataplaneState initial, OrchestratorOptions options = {},
                   std::size_t subscriber_capacity = 1024);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Latest applied snapshot, as JSON and as state.
  [[nodiscard]] std::shared_ptr<const nlohmann::json> snapshot() const;
  [[nodiscard]] std::shared_ptr<const DataplaneState> state() const;
  [[nodiscard]] std::uint64_t version() const;

  /// Queues a level change. NotFoundError for unknown links, ValidationError
  /// for negative levels. Returns the assigned version.
  std::uint64_t set_link_security(const NodeId& src, const NodeId& dst, SecurityLevel level);
  /// Queues an SLA replacement. ParseError for malformed CSV.
  std::uint64_t update_sla(std::string_view csv);
  /// Admits or rejects a flow between two hosts and waits for the result.
  /// NotFoundError for unknown hosts; ParseError or ValidationError when the
  /// header does not parse or its addresses are not those of the hosts.
  FlowDecision inject_flow(std::string_view source_host, std::string_view dest_host,
                           std::string_view header_hex);

  std::shared_ptr<Subscription> subscribe();
  /// Blocks until `version` has been applied or the timeout expires.
  bool wait_for(std::uint64_t version, std::chrono::milliseconds timeout) const;
  void stop();

 private:
  struct Task {
    std::uint64_t version = 0;
    NetworkEvent event;
    std::shared_ptr<std::promise<FlowDecision>> reply;
  };

  std::uint64_t submit(EventPayload payload, std::shared_ptr<std::promise<FlowDecision>> reply);
  void run();
  void apply(Task& task);
  void publish(const nlohmann::json& delta);

  OrchestratorOptions options_;
  std::size_t subscriber_capacity_;

  mutable std::mutex state_mu_;
  mutable std::condition_variable applied_cv_;
  std::shared_ptr<const DataplaneState> state_;
  std::shared_ptr<const nlohmann::json> snapshot_;
  std::uint64_t applied_ = 0;

  std::mutex queue_mu_;
  std::condition_variable queue_cv_;
  std::deque<Task> queue_;
  std::uint64_t assigned_ = 0;
  bool stopping_ = false;

  std::mutex subs_mu_;
  std::vector<std::shared_ptr<Subscription>> subs_;

  std::thread worker_;
};

}  // namespace farsec
