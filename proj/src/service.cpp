#include "farsec/service.hpp"

#include <fstream>
#include <sstream>

#include "farsec/api_model.hpp"
#include "farsec/error.hpp"

namespace farsec {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::optional<fs::path> find_input(const fs::path& dir, const std::string& kind) {
  const auto plain = dir / (kind + ".csv");
  if (fs::exists(plain)) {
    return plain;
  }
  std::optional<fs::path> found;
  const auto suffix = "." + kind + ".csv";
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.size() > suffix.size() && name.ends_with(suffix)) {
      if (found) {
        throw ValidationError("directory " + dir.string() + " holds more than one *" + suffix);
      }
      found = entry.path();
    }
  }
  return found;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) {
    throw NotFoundError("cannot open " + p.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

DataplaneState load_state(const fs::path& dir, const OrchestratorOptions& options) {
  if (!fs::is_directory(dir)) {
    throw NotFoundError("no such directory: " + dir.string());
  }
  const auto resources = find_input(dir, "resources");
  if (!resources) {
    throw NotFoundError("no resources.csv in " + dir.string());
  }
  const auto net = parse_resources(read_file(*resources));

  SlaPolicy sla;
  if (const auto p = find_input(dir, "sla")) {
    sla = parse_sla(read_file(*p));
  }
  std::vector<HostAttachment> hosts;
  if (const auto p = find_input(dir, "hosts")) {
    hosts = parse_hosts(read_file(*p));
  }

  Orchestrator orch(initial_state(net, std::move(hosts), std::move(sla)), options);
  if (const auto p = find_input(dir, "requests")) {
    for (auto& flow : parse_requests(read_file(*p))) {
      orch.handle(NetworkEvent{0, events::FlowRequested{std::move(flow)}});
    }
  }
  return orch.state();
}

// Subscription -------------------------------------------------------------

std::optional<json> Subscription::next(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, timeout, [&] { return closed_ || !queue_.empty(); });
  if (queue_.empty()) {
    return std::nullopt;
  }
  auto out = std::move(queue_.front());
  queue_.pop_front();
  return out;
}

bool Subscription::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

void Subscription::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

bool Subscription::offer(const json& delta) {
  {
    std::lock_guard lock(mu_);
    if (closed_) {
      return false;
    }
    if (queue_.size() >= capacity_) {
      closed_ = true;
      queue_.clear();
    } else {
      queue_.push_back(delta);
    }
  }
  cv_.notify_all();
  return !closed();
}

// Service ------------------------------------------------------------------

Service::Service(DataplaneState initial, OrchestratorOptions options,
                 std::size_t subscriber_capacity)
    : options_(options),
      subscriber_capacity_(subscriber_capacity),
      state_(std::make_shared<const DataplaneState>(std::move(initial))) {
  snapshot_ = std::make_shared<const json>(snapshot_json(*state_, 0));
  worker_ = std::thread([this] { run(); });
}

Service::~Service() { stop(); }

std::shared_ptr<const json> Service::snapshot() const {
  std::lock_guard lock(state_mu_);
  return snapshot_;
}

std::shared_ptr<const DataplaneState> Service::state() const {
  std::lock_guard lock(state_mu_);
  return state_;
}

std::uint64_t Service::version() const {
  std::lock_guard lock(state_mu_);
  return applied_;
}

std::uint64_t Service::set_link_security(const NodeId& src, const NodeId& dst,
                                         SecurityLevel level) {
  if (!state()->find_link(src, dst)) {
    throw NotFoundError("unknown link " + src + "->" + dst);
  }
  if (level < 0 || level == kUnbounded) {
    throw ValidationError("invalid level " + std::to_string(level));
  }
  return submit(events::LinkSecurityChanged{src, dst, level}, nullptr);
}

std::uint64_t Service::update_sla(std::string_view csv) {
  return submit(events::SlaUpdated{parse_sla(csv)}, nullptr);
}

FlowDecision Service::inject_flow(std::string_view source_host, std::string_view dest_host,
                                  std::string_view header_hex) {
  const auto current = state();
  const auto* src = current->find_host(source_host);
  const auto* dst = current->find_host(dest_host);
  if (!src) {
    throw NotFoundError("unknown host '" + std::string(source_host) + "'");
  }
  if (!dst) {
    throw NotFoundError("unknown host '" + std::string(dest_host) + "'");
  }
  auto header = decode_hex(header_hex);
  const auto fields = parse_header(header);
  if (fields.source != src->address || fields.destination != dst->address) {
    throw ValidationError("header addresses " + fields.source.to_string() + "->" +
                          fields.destination.to_string() + " do not belong to hosts " +
                          src->host + "->" + dst->host);
  }
  auto reply = std::make_shared<std::promise<FlowDecision>>();
  auto result = reply->get_future();
  submit(events::PacketIn{std::move(header), src->device, std::nullopt}, reply);
  return result.get();
}

std::shared_ptr<Subscription> Service::subscribe() {
  auto sub = std::make_shared<Subscription>(subscriber_capacity_);
  std::lock_guard lock(subs_mu_);
  sub->base_ = snapshot();
  {
    std::lock_guard q(queue_mu_);
    if (stopping_) {
      sub->close();
      return sub;
    }
  }
  subs_.push_back(sub);
  return sub;
}

bool Service::wait_for(std::uint64_t version, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(state_mu_);
  return applied_cv_.wait_for(lock, timeout, [&] { return applied_ >= version; });
}

void Service::stop() {
  {
    std::lock_guard lock(queue_mu_);
    if (stopping_ && !worker_.joinable()) {
      return;
    }
    stopping_ = true;
  }
  queue_cv_.notify_all();
  if (worker_.joinable()) {
    worker_.join();
  }
  std::lock_guard lock(subs_mu_);
  for (auto& s : subs_) {
    s->close();
  }
  subs_.clear();
}

std::uint64_t Service::submit(EventPayload payload,
                              std::shared_ptr<std::promise<FlowDecision>> reply) {
  std::uint64_t v = 0;
  {
    std::lock_guard lock(queue_mu_);
    if (stopping_) {
      throw Error("service is stopping");
    }
    v = ++assigned_;
    queue_.push_back(Task{v, NetworkEvent{v, std::move(payload)}, std::move(reply)});
  }
  queue_cv_.notify_one();
  return v;
}

void Service::run() {
  for (;;) {
    Task task;
    {
      std::unique_lock lock(queue_mu_);
      queue_cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (queue_.empty()) {
        break;  // stopping, queue drained
      }
      task = std::move(queue_.front());
      queue_.pop_front();
    }
    apply(task);
  }
  // Unblock anyone still waiting on a reply.
  std::lock_guard lock(queue_mu_);
  for (auto& t : queue_) {
    if (t.reply) {
      t.reply->set_exception(std::make_exception_ptr(Error("service stopped")));
    }
  }
  queue_.clear();
}

void Service::apply(Task& task) {
  const auto before = state();
  const auto before_snapshot = snapshot();
  std::shared_ptr<const DataplaneState> after;
  std::shared_ptr<const json> after_snapshot;
  json delta;
  std::optional<FlowDecision> decision;
  std::exception_ptr failure;

  try {
    auto t = apply_event(*before, task.event, options_);
    after = std::make_shared<const DataplaneState>(std::move(t.state));
    after_snapshot = std::make_shared<const json>(snapshot_json(*after, task.version));
    delta = make_delta(*before_snapshot, *after_snapshot, t.changes, task.version);
    if (task.reply) {
      const auto& packet = std::get<events::PacketIn>(task.event.payload);
      const auto* f = after->find_flow(parse_header(packet.header));
      decision = FlowDecision{f->id, f->admitted(), f->path, f->requirement, task.version};
    }
  } catch (const std::exception& e) {
    failure = std::current_exception();
    after = before;
    auto snap = *before_snapshot;
    snap["version"] = task.version;
    after_snapshot = std::make_shared<const json>(std::move(snap));
    delta = json{{"version", task.version}, {"changes", json::array()}, {"error", e.what()}};
  }

  {
    // Holding subs_mu_ across the swap keeps each subscriber's base snapshot
    // and its first delta contiguous.
    std::lock_guard subs(subs_mu_);
    {
      std::lock_guard lock(state_mu_);
      state_ = after;
      snapshot_ = after_snapshot;
      applied_ = task.version;
    }
    applied_cv_.notify_all();
    publish(delta);
  }

  if (task.reply) {
    if (failure) {
      task.reply->set_exception(failure);
    } else {
      task.reply->set_value(std::move(*decision));
    }
  }
}

void Service::publish(const json& delta) {
  std::erase_if(subs_, [&](const std::shared_ptr<Subscription>& s) { return !s->offer(delta); });
}

}  // namespace farsec
