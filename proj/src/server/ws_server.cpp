#include "hybrid_tetris/server/ws_server.hpp"

#include <chrono>
#include <csignal>
#include <deque>
#include <iostream>
#include <map>
#include <memory>
#include <string>

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/signal_set.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace hybrid_tetris::server {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

class Hub;

class Connection : public std::enable_shared_from_this<Connection> {
public:
    Connection(tcp::socket socket, Hub& hub, ConnectionId id) : ws_(std::move(socket)), hub_(hub), id_(id) {}

    void start();
    void send(std::string text);
    void close();

private:
    void read();
    void write_next();

    websocket::stream<beast::tcp_stream> ws_;
    Hub& hub_;
    ConnectionId id_;
    beast::flat_buffer buffer_;
    std::deque<std::string> queue_;
    bool open_ = false;
    bool writing_ = false;
    bool closing_ = false;
};

class Hub {
public:
    Hub(asio::io_context& io, ServerCore& core, const ServeOptions& options)
        : io_(io), core_(core), options_(options), acceptor_(io), timer_(io), signals_(io, SIGINT, SIGTERM) {}

    void run() {
        const tcp::endpoint endpoint(tcp::v4(), options_.port);
        acceptor_.open(endpoint.protocol());
        acceptor_.set_option(asio::socket_base::reuse_address(true));
        acceptor_.bind(endpoint);
        acceptor_.listen();
        if (options_.on_listening) {
            options_.on_listening(acceptor_.local_endpoint().port());
        }
        if (options_.autostart) {
            core_.start();
        }
        signals_.async_wait([this](beast::error_code, int) {
            dispatch(core_.shutdown());
            stop();
        });
        accept();
        period_ = std::chrono::microseconds(1'000'000 / std::max(1, core_.session().config().tick_hz));
        next_ = std::chrono::steady_clock::now() + period_;
        schedule();
        io_.run();
    }

    void received(ConnectionId id, const std::string& text) { dispatch(core_.receive(id, text)); }

    void dropped(ConnectionId id) {
        core_.disconnect(id);
        connections_.erase(id);
    }

private:
    void accept() {
        acceptor_.async_accept([this](beast::error_code ec, tcp::socket socket) {
            if (ec) {
                return;
            }
            const auto id = ++last_id_;
            auto conn = std::make_shared<Connection>(std::move(socket), *this, id);
            connections_[id] = conn;
            conn->start();
            accept();
        });
    }

    void schedule() {
        timer_.expires_at(next_);
        timer_.async_wait([this](beast::error_code ec) {
            if (ec) {
                return;
            }
            next_ += period_;
            if (options_.stop && options_.stop->load()) {
                dispatch(core_.shutdown());
                stop();
                return;
            }
            try {
                dispatch(core_.tick());
            } catch (const std::exception& e) {
                std::cerr << "tick failed: " << e.what() << '\n';
                stop();
                return;
            }
            if (core_.ended() && options_.exit_on_end) {
                stop();
                return;
            }
            schedule();
        });
    }

    void dispatch(const std::vector<Outbound>& out) {
        for (const auto& o : out) {
            const auto it = connections_.find(o.connection);
            if (it != connections_.end()) {
                it->second->send(encode(o.message));
            }
        }
    }

    void stop() {
        beast::error_code ignored;
        acceptor_.close(ignored);
        timer_.cancel();
        signals_.cancel();
        for (auto& [id, conn] : connections_) {
            conn->close();
        }
        // let pending frames drain, then give up
        auto grace = std::make_shared<asio::steady_timer>(io_, std::chrono::milliseconds(200));
        grace->async_wait([this, grace](beast::error_code) { io_.stop(); });
    }

    asio::io_context& io_;
    ServerCore& core_;
    const ServeOptions& options_;
    tcp::acceptor acceptor_;
    asio::steady_timer timer_;
    asio::signal_set signals_;
    std::map<ConnectionId, std::shared_ptr<Connection>> connections_;
    ConnectionId last_id_ = 0;
    std::chrono::steady_clock::duration period_{};
    std::chrono::steady_clock::time_point next_{};
};

void Connection::start() {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.text(true);
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
        if (ec) {
            self->hub_.dropped(self->id_);
            return;
        }
        self->open_ = true;
        self->write_next();
        self->read();
    });
}

void Connection::read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
        if (ec) {
            self->open_ = false;
            self->hub_.dropped(self->id_);
            return;
        }
        const auto text = beast::buffers_to_string(self->buffer_.data());
        self->buffer_.consume(self->buffer_.size());
        self->hub_.received(self->id_, text);
        self->read();
    });
}

void Connection::send(std::string text) {
    if (closing_) {
        return;
    }
    queue_.push_back(std::move(text));
    write_next();
}

void Connection::write_next() {
    if (writing_ || !open_) {
        return;
    }
    if (queue_.empty()) {
        if (closing_) {
            open_ = false;
            ws_.async_close(websocket::close_code::going_away, [self = shared_from_this()](beast::error_code) {});
        }
        return;
    }
    writing_ = true;
    ws_.async_write(asio::buffer(queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
        self->writing_ = false;
        if (ec) {
            self->open_ = false;
            return;
        }
        self->queue_.pop_front();
        self->write_next();
    });
}

void Connection::close() {
    closing_ = true;
    write_next();
}

}  // namespace

void serve(ServerCore& core, const ServeOptions& options) {
    asio::io_context io(1);
    Hub hub(io, core, options);
    hub.run();
}

}  // namespace hybrid_tetris::server
