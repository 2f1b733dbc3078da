#pragma once

#include "darima/cluster/protocol.hpp"
#include "darima/error.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <string>
#include <utility>
#include <vector>

namespace darima::cluster {

/// Raised when a peer cannot be reached or the connection breaks mid-exchange.
class TransportError : public Error {
public:
	explicit TransportError(const std::string &message) : Error(ErrorCode::worker_unavailable, message) {}
};

struct Endpoint {
	std::string host;
	std::uint16_t port = 0;

	std::string to_string() const { return host + ":" + std::to_string(port); }
};

/// Parses "host:port"; a bare port binds or connects on 127.0.0.1.
inline Endpoint parse_endpoint(const std::string &address) {
	const auto colon = address.rfind(':');
	std::string host = colon == std::string::npos ? "127.0.0.1" : address.substr(0, colon);
	const std::string port = colon == std::string::npos ? address : address.substr(colon + 1);
	if (host.empty()) {
		host = "0.0.0.0";
	}
	char *end = nullptr;
	errno = 0;
	const long v = std::strtol(port.c_str(), &end, 10);
	if (port.empty() || *end != '\0' || errno != 0 || v < 0 || v > 65535) {
		fail(ErrorCode::invalid_argument, "bad address '" + address + "': expected host:port");
	}
	return {host, static_cast<std::uint16_t>(v)};
}

/// Owning file descriptor.
class Socket {
public:
	Socket() = default;
	explicit Socket(int fd) : fd_(fd) {}
	Socket(const Socket &) = delete;
	Socket &operator=(const Socket &) = delete;
	Socket(Socket &&o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
	Socket &operator=(Socket &&o) noexcept {
		if (this != &o) {
			close();
			fd_ = std::exchange(o.fd_, -1);
		}
		return *this;
	}
	~Socket() { close(); }

	int fd() const noexcept { return fd_; }
	bool valid() const noexcept { return fd_ >= 0; }
	void close() noexcept {
		if (fd_ >= 0) {
			::close(fd_);
			fd_ = -1;
		}
	}

private:
	int fd_ = -1;
};

inline Socket connect_to(const Endpoint &ep) {
	addrinfo hints{};
	hints.ai_family = AF_UNSPEC;
	hints.ai_socktype = SOCK_STREAM;
	addrinfo *res = nullptr;
	const std::string port = std::to_string(ep.port);
	if (::getaddrinfo(ep.host.c_str(), port.c_str(), &hints, &res) != 0) {
		throw TransportError("cannot resolve " + ep.to_string());
	}
	Socket sock;
	for (addrinfo *ai = res; ai != nullptr; ai = ai->ai_next) {
		Socket s(::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol));
		if (!s.valid()) {
			continue;
		}
		if (::connect(s.fd(), ai->ai_addr, ai->ai_addrlen) == 0) {
			sock = std::move(s);
			break;
		}
	}
	::freeaddrinfo(res);
	if (!sock.valid()) {
		throw TransportError("cannot connect to " + ep.to_string());
	}
	const int one = 1;
	::setsockopt(sock.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
	return sock;
}

inline Socket listen_on(const Endpoint &ep) {
	addrinfo hints{};
	hints.ai_family = AF_UNSPEC;
	hints.ai_socktype = SOCK_STREAM;
	hints.ai_flags = AI_PASSIVE;
	addrinfo *res = nullptr;
	const std::string port = std::to_string(ep.port);
	if (::getaddrinfo(ep.host.c_str(), port.c_str(), &hints, &res) != 0) {
		fail(ErrorCode::io_error, "cannot resolve bind address " + ep.to_string());
	}
	Socket sock;
	for (addrinfo *ai = res; ai != nullptr; ai = ai->ai_next) {
		Socket s(::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol));
		if (!s.valid()) {
			continue;
		}
		const int one = 1;
		::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
		if (::bind(s.fd(), ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(s.fd(), 64) == 0) {
			sock = std::move(s);
			break;
		}
	}
	::freeaddrinfo(res);
	if (!sock.valid()) {
		fail(ErrorCode::io_error, "cannot listen on " + ep.to_string() + ": " + std::strerror(errno));
	}
	return sock;
}

inline std::uint16_t local_port(const Socket &s) {
	sockaddr_storage addr{};
	socklen_t len = sizeof addr;
	if (::getsockname(s.fd(), reinterpret_cast<sockaddr *>(&addr), &len) != 0) {
		fail(ErrorCode::io_error, "getsockname failed");
	}
	if (addr.ss_family == AF_INET6) {
		return ntohs(reinterpret_cast<sockaddr_in6 *>(&addr)->sin6_port);
	}
	return ntohs(reinterpret_cast<sockaddr_in *>(&addr)->sin_port);
}

inline void send_all(int fd, const std::uint8_t *data, std::size_t n) {
	while (n > 0) {
		const ssize_t w = ::send(fd, data, n, MSG_NOSIGNAL);
		if (w < 0 && errno == EINTR) {
			continue;
		}
		if (w <= 0) {
			throw TransportError(std::string("send failed: ") + std::strerror(errno));
		}
		data += w;
		n -= static_cast<std::size_t>(w);
	}
}

/// Returns false on a clean end of stream before the first byte.
inline bool recv_all(int fd, std::uint8_t *data, std::size_t n) {
	std::size_t got = 0;
	while (got < n) {
		const ssize_t r = ::recv(fd, data + got, n - got, 0);
		if (r < 0 && errno == EINTR) {
			continue;
		}
		if (r == 0 && got == 0) {
			return false;
		}
		if (r <= 0) {
			throw TransportError("connection closed mid-frame");
		}
		got += static_cast<std::size_t>(r);
	}
	return true;
}

inline void write_frame(int fd, const std::vector<std::uint8_t> &payload) {
	const auto bytes = frame(payload);
	send_all(fd, bytes.data(), bytes.size());
}

/// Reads one frame; false when the peer closed the connection between frames.
inline bool read_frame(int fd, std::vector<std::uint8_t> &payload) {
	std::uint8_t header[4];
	if (!recv_all(fd, header, 4)) {
		return false;
	}
	const auto n = frame_length(header);
	if (n > kMaxFrameBytes) {
		fail(ErrorCode::protocol_error, "frame of " + std::to_string(n) + " bytes exceeds the limit");
	}
	payload.resize(n);
	if (n > 0 && !recv_all(fd, payload.data(), n)) {
		throw TransportError("connection closed mid-frame");
	}
	return true;
}

} // namespace darima::cluster
