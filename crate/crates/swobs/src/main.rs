fn main() {
    // Die quietly when the output pipe closes (e.g. `swobs ... | head`)
    // instead of panicking on the failed write.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    std::process::exit(swobs::cli::run())
}
