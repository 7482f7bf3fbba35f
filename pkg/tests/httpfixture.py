"""Local HTTP server standing in for a text mirror."""

import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer


class FixtureServer:
    """Serves ``/<name>.txt`` from a dict and counts requests."""

    def __init__(self, files):
        self.files = files
        self.hits = 0
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def do_GET(self):
                outer.hits += 1
                body = outer.files.get(self.path.lstrip("/"))
                if body is None:
                    self.send_error(404)
                    return
                self.send_response(200)
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def log_message(self, *args):
                pass

        self.httpd = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        self.thread.start()

    @property
    def template(self):
        return f"http://127.0.0.1:{self.httpd.server_address[1]}/{{id}}.txt"

    def close(self):
        self.httpd.shutdown()
        self.httpd.server_close()
