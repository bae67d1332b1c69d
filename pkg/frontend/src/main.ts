import { ApiClient } from "./api.js";
import { boot } from "./app.js";

const root = document.getElementById("app");
if (root) {
  const app = boot(root, new ApiClient(""));
  void app.refreshSidebar().then(() => {
    app.store.setTab("graph");
  });
}
