class Response:
    pass


class Request:
    pass


class PreparedRequest(Request):
    pass
