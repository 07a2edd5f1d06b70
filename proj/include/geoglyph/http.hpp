#pragma once

// Binds a Service to cpp-httplib. Requires httplib.h on the include path.

#include <httplib.h>

#include "geoglyph/service.hpp"

namespace geoglyph {

inline void mount(httplib::Server& server, const Service& service) {
  auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
    const Response r = service.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, r.content_type.c_str());
  };
  for (const char* p : {"/render", "/validate", "/suggest"}) server.Post(p, forward);
  server.Get("/catalog", forward);
  server.Get("/gallery", forward);
  server.Get(R"(/gallery/[^/]+\.svg)", forward);
  server.set_error_handler([&service](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    const Response r = service.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, r.content_type.c_str());
  });
}

}  // namespace geoglyph
