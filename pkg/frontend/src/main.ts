import { ApiClient } from "./api.js";
import { App } from "./app.js";

const root = document.getElementById("app");
if (root) {
  const app = new App(
    root,
    new ApiClient((url, init) => fetch(url, init)),
    window,
  );
  void app.boot();
}
