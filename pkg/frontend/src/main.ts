import { ApiClient } from "./api.js";
import { createApp } from "./app.js";

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("api") ?? "http://127.0.0.1:8080";
const token = params.get("token") ?? window.localStorage.getItem("vital-token") ?? "";
if (token) window.localStorage.setItem("vital-token", token);

const root = document.getElementById("app");
if (!root) throw new Error("missing #app element");
const app = createApp(root, new ApiClient(baseUrl, token));
void app.start();
